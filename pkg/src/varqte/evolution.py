"""The joint parameter-plus-bound ODE.

The integrated state is y = (omega_0 .. omega_k, eps): parameter
velocities come from the configured ODE definition and the bound rate
from the matching theorem (gradient-error norm for real time, the
finite-difference increment for imaginary time).  Because eps is a
component of y, adaptive integrators control their step size against the
bound's dynamics as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import bounds
from .ansatz import Ansatz
from .mclachlan import evaluate_terms
from .ode import OdeOptions, StepRecord, error_norm_sq, solve_argmin, solve_standard
from .pauli import PauliSum, spectral_norm


@dataclass(frozen=True)
class EvolutionProblem:
    """Everything the joint right-hand side needs, fixed for one run."""

    hamiltonian: PauliSum
    ansatz: Ansatz
    kind: str  # "real" | "imag"
    ode: OdeOptions
    fd_delta: float = 1e-4
    norm_mode: str = "exact"
    grid_points: int = bounds.DEFAULT_GRID_POINTS

    def __post_init__(self):
        if self.kind not in ("real", "imag"):
            raise ValueError(f"unknown evolution kind {self.kind!r}")
        # resolve the operator norm once; zeta is monotone in it, so the
        # coefficient bound stays valid for larger systems
        object.__setattr__(
            self, "_h_norm", spectral_norm(self.hamiltonian, self.norm_mode)
        )

    @property
    def h_norm(self) -> float:
        return self._h_norm


def joint_rhs(problem: EvolutionProblem, t: float, y: np.ndarray) -> tuple[np.ndarray, StepRecord]:
    """Evaluate (omega_dot, eps_dot) and the local diagnostics at (t, y)."""
    omega = np.asarray(y[:-1], dtype=float)
    eps = float(y[-1])
    terms = evaluate_terms(problem.ansatz, omega, problem.hamiltonian)
    if problem.ode.kind == "argmin":
        omega_dot, condition, converged = solve_argmin(terms, problem.kind, problem.ode)
    else:
        omega_dot, condition = solve_standard(terms, problem.kind, problem.ode)
        converged = True

    if problem.kind == "real":
        e_norm = math.sqrt(error_norm_sq(terms, omega_dot, "real"))
        eps_rate = e_norm
        z = x = None
    else:
        increment = bounds.qite_increment(
            terms,
            omega_dot,
            max(eps, 0.0),
            problem.fd_delta,
            problem.h_norm,
            problem.grid_points,
        )
        e_norm = increment.grad_error_norm
        eps_rate = increment.rate
        z, x = increment.zeta, increment.chi

    record = StepRecord(
        t=t,
        omega=omega,
        epsilon=eps,
        omega_dot=omega_dot,
        e_norm=e_norm,
        energy=terms.energy,
        variance=terms.variance,
        step_size=0.0,
        zeta=z,
        chi=x,
        fq_condition=condition,
        argmin_converged=converged,
    )
    return np.concatenate([omega_dot, [eps_rate]]), record
