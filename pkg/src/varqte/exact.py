"""Exact time evolution and state-distance measures (ground truth).

States are evolved independently at each requested time from the cached
eigendecomposition of H, so there is no error accumulation: accuracy is
limited only by the eigensolver.  The Bures distance

    B(a, b) = sqrt(<a|a> + <b|b> - 2 |<a|b>|)

is used in its general (not necessarily normalized) form and is invariant
under global phases of either argument.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliSum, expectation, herm_expm_apply


def exact_evolve(h: PauliSum, psi0: np.ndarray, t: float, kind: str) -> np.ndarray:
    """Evolve ``psi0`` for time ``t``: unitary for "real", renormalized decay for "imag"."""
    if kind == "real":
        return herm_expm_apply(h, -1j * t, psi0)
    if kind == "imag":
        return herm_expm_apply(h, -t, psi0, renormalize=True)
    raise ValueError(f"unknown evolution kind {kind!r}")


def bures(psi: np.ndarray, phi: np.ndarray) -> float:
    """Global-phase-invariant distance between two (possibly unnormalized) states."""
    if len(psi) != len(phi):
        raise ValueError("states have different dimensions")
    radicand = (
        float(np.real(np.vdot(psi, psi)))
        + float(np.real(np.vdot(phi, phi)))
        - 2.0 * abs(np.vdot(psi, phi))
    )
    return float(np.sqrt(max(radicand, 0.0)))


def fidelity(psi: np.ndarray, phi: np.ndarray) -> float:
    """|<psi|phi>|^2 for normalized states."""
    if len(psi) != len(phi):
        raise ValueError("states have different dimensions")
    return float(abs(np.vdot(psi, phi)) ** 2)


@dataclass(frozen=True)
class ExactTrajectory:
    """Exact states and energies sampled at the variational trajectory's times."""

    times: tuple[float, ...]
    states: tuple[np.ndarray, ...]
    energies: tuple[float, ...]


def exact_trajectory(h: PauliSum, psi0: np.ndarray, times, kind: str) -> ExactTrajectory:
    """Sample the exact evolution of ``psi0`` at the given times."""
    states = []
    energies = []
    for t in times:
        state = exact_evolve(h, psi0, float(t), kind)
        states.append(state)
        energies.append(expectation(h, state))
    return ExactTrajectory(
        times=tuple(float(t) for t in times),
        states=tuple(states),
        energies=tuple(energies),
    )
