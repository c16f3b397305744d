"""The three benchmark problems: Hamiltonians, circuits, initial states."""

from __future__ import annotations

import numpy as np

from .ansatz import Ansatz, efficient_su2, initial_parameters, prepare
from .exact import bures
from .pauli import PauliSum, PauliTerm

PRESET_NAMES = ("illustrative", "ising", "hydrogen")

# transverse-field Ising chain parameters: H = -J (sum ZZ + g sum X) on an
# open 3-qubit chain
_ISING_J = -0.5
_ISING_G = -0.5


def preset_hamiltonian(name: str) -> PauliSum:
    if name == "illustrative":
        return PauliSum([PauliTerm(1.0, "ZX"), PauliTerm(1.0, "XZ"), PauliTerm(3.0, "ZZ")])
    if name == "ising":
        terms = [
            PauliTerm(-_ISING_J, "ZZI"),
            PauliTerm(-_ISING_J, "IZZ"),
            PauliTerm(-_ISING_J * _ISING_G, "XII"),
            PauliTerm(-_ISING_J * _ISING_G, "IXI"),
            PauliTerm(-_ISING_J * _ISING_G, "IIX"),
        ]
        return PauliSum(terms)
    if name == "hydrogen":
        return PauliSum(
            [
                PauliTerm(0.2252, "II"),
                PauliTerm(0.5716, "ZZ"),
                PauliTerm(0.3435, "IZ"),
                PauliTerm(-0.4347, "ZI"),
                PauliTerm(0.0910, "YY"),
                PauliTerm(0.0910, "XX"),
            ]
        )
    raise ValueError(f"unknown preset {name!r}")


def preset_ansatz(name: str) -> Ansatz:
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}")
    return efficient_su2(3 if name == "ising" else 2)


def preset_reference_state(name: str, n_qubits: int) -> np.ndarray:
    """The state the initial-parameter recipe is supposed to prepare."""
    if name in ("illustrative", "hydrogen"):
        return np.full(2**n_qubits, 2.0 ** (-n_qubits / 2), dtype=complex)  # |+...+>
    state = np.zeros(2**n_qubits, dtype=complex)
    state[0] = 1.0  # |0...0> up to a global phase
    return state


def preset_initial_parameters(name: str, seed: int | None = None) -> np.ndarray:
    """Initial parameters, validated against the intended initial state.

    Rather than trusting the layer recipe, the prepared state is checked
    against the intended one at startup.  The check runs on the fidelity
    deficit 1 - |<psi|ref>|^2, which resolves phase-only deviations down
    to machine precision; the Bures distance itself carries sqrt(eps)
    rounding noise near zero.
    """
    omega = initial_parameters(name, seed)
    ansatz = preset_ansatz(name)
    prepared = prepare(ansatz, omega)
    reference = preset_reference_state(name, ansatz.n_qubits)
    deficit = 1.0 - abs(np.vdot(prepared, reference)) ** 2
    if deficit > 1e-10:
        raise AssertionError(
            f"initial-parameter recipe for {name!r} drifted: fidelity deficit {deficit:.3e}"
        )
    return omega
