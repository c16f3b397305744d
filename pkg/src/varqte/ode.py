"""Parameter ODE right-hand sides and explicit integrators.

Two equivalent definitions of the parameter velocity:

* standard -- solve the McLachlan linear system F omega_dot = r by least
  squares with a relative singular-value cutoff (minimal-norm solution);
* argmin   -- minimize the gradient-error quadratic
  Var + w^T F w - 2 w^T r directly, seeded with the least-squares
  solution and polished by iterative refinement, keeping the best
  iterate.  The two agree analytically; the argmin form is the more
  robust one when F is ill-conditioned.

Integrators are generic over f(t, y): forward Euler with a fixed step and
an embedded Dormand-Prince 5(4) pair with PI step-size control.  Both
record accepted steps only (plus the initial point).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .ansatz import Ansatz
from .mclachlan import McLachlanTerms, evaluate_terms, imag_rhs, real_rhs
from .pauli import PauliSum

logger = logging.getLogger(__name__)

EVOLUTION_KINDS = ("real", "imag")

# relative rounding floor used to certify a vanishing gradient error; the
# quadratic form cancels catastrophically when the residual is exactly
# representable, and integrating that noise would poison the bound ODE
_ZERO_FLOOR = 32.0 * np.finfo(float).eps


class IntegrationError(RuntimeError):
    """Integration aborted; carries the records accepted so far."""

    def __init__(self, message: str, records=None):
        super().__init__(message)
        self.records = records or []


@dataclass(frozen=True)
class OdeOptions:
    """ODE definition (standard | argmin) and its solver parameters."""

    kind: str = "standard"
    lstsq_cutoff: float = 1e-8
    refine_budget: int = 8
    refine_tol: float = 1e-13

    def __post_init__(self):
        if self.kind not in ("standard", "argmin"):
            raise ValueError(f"unknown ODE kind {self.kind!r}")
        if self.lstsq_cutoff <= 0:
            raise ValueError("lstsq_cutoff must be positive")
        if self.refine_budget < 1:
            raise ValueError("refine_budget must be at least 1")


@dataclass
class StepRecord:
    """One accepted trajectory point with local diagnostics."""

    t: float
    omega: np.ndarray
    epsilon: float
    omega_dot: np.ndarray
    e_norm: float
    energy: float
    variance: float
    step_size: float
    zeta: float | None = None
    chi: float | None = None
    fq_condition: float = math.inf
    argmin_converged: bool = True


def _rhs_vector(terms: McLachlanTerms, kind: str) -> np.ndarray:
    if kind == "real":
        return real_rhs(terms)
    if kind == "imag":
        return imag_rhs(terms)
    raise ValueError(f"unknown evolution kind {kind!r}")


def error_norm_sq(terms: McLachlanTerms, omega_dot: np.ndarray, kind: str) -> float:
    """Squared gradient-error norm ||e_t||_2^2 for a candidate velocity.

    Evaluates Var + w^T F w - 2 w^T r (the same quadratic for both
    evolution kinds; the sign conventions live in the rhs vectors).  The
    value is certified against its own rounding noise: results below a
    running-error floor are returned as exactly 0.0, since the expression
    cancels to machine precision whenever the ansatz represents the flow
    exactly.  Values below -1e-6 raise, signalling an inconsistent bundle.
    """
    w = np.asarray(omega_dot, dtype=float)
    r = _rhs_vector(terms, kind)
    fw = terms.fq @ w
    quad = float(w @ fw)
    lin = 2.0 * float(w @ r)
    raw = terms.variance + quad - lin
    # running-error scale for the computed value.  Beyond the summation
    # error of the quadratic itself, the entries of F and r carry their own
    # rounding uncertainty (they are inner products of O(1/2)-norm
    # vectors), which the quadratic amplifies by |w|^2 and |w|: on plateau
    # steps the cutoff least-squares velocity reaches 1e4+ and the value
    # is not resolvable below ~1e-7 by any evaluation of this expression.
    abs_w = np.abs(w)
    sum_w = float(np.sum(abs_w))
    entry_f = 0.25 + float(np.max(np.abs(terms.fq)))
    entry_r = 0.5 * (1.0 + math.sqrt(terms.h2)) + float(np.max(np.abs(r), initial=0.0))
    scale = (
        abs(terms.variance)
        + terms.h2
        + float(abs_w @ (np.abs(terms.fq) @ abs_w))
        + 2.0 * float(abs_w @ np.abs(r))
        + sum_w * sum_w * entry_f
        + 2.0 * sum_w * entry_r
    )
    floor = _ZERO_FLOOR * scale
    if raw < -max(1e-6, floor):
        raise ArithmeticError(
            f"gradient-error norm^2 is strongly negative ({raw:.3e}); inconsistent terms"
        )
    if raw <= floor:
        if raw < -max(1e-9, floor):
            logger.warning("gradient-error norm^2 clamped from %.3e", raw)
        return 0.0
    return raw


def solve_standard(terms: McLachlanTerms, kind: str, options: OdeOptions) -> tuple[np.ndarray, float]:
    """Minimal-norm least-squares solution of F omega_dot = rhs.

    Returns (omega_dot, condition number of F); rank deficiency is handled
    by the pseudo-inverse implied by the singular-value cutoff.
    """
    r = _rhs_vector(terms, kind)
    solution, _, _, singular = np.linalg.lstsq(terms.fq, r, rcond=options.lstsq_cutoff)
    smallest = singular[-1] if len(singular) else 0.0
    condition = float(singular[0] / smallest) if smallest > 0 else math.inf
    return solution, condition


def solve_argmin(
    terms: McLachlanTerms, kind: str, options: OdeOptions
) -> tuple[np.ndarray, float, bool]:
    """Directly minimize the gradient-error quadratic over omega_dot.

    Starts from the least-squares solution and applies iterative
    refinement on the normal equations, accepting an iterate only when it
    lowers the quadratic, so the result can never be worse than the
    standard solution.  Returns (omega_dot, condition, converged).
    """
    r = _rhs_vector(terms, kind)
    x, _, _, singular = np.linalg.lstsq(terms.fq, r, rcond=options.lstsq_cutoff)
    smallest = singular[-1] if len(singular) else 0.0
    condition = float(singular[0] / smallest) if smallest > 0 else math.inf

    def quad(v: np.ndarray) -> float:
        return float(v @ (terms.fq @ v)) - 2.0 * float(v @ r)

    best, best_q = x, quad(x)
    converged = False
    current = x
    for _ in range(options.refine_budget):
        residual = r - terms.fq @ current
        step, *_ = np.linalg.lstsq(terms.fq, residual, rcond=options.lstsq_cutoff)
        if not np.all(np.isfinite(step)):
            break
        current = current + step
        q = quad(current)
        if q < best_q:
            best, best_q = current, q
        if float(np.linalg.norm(step)) <= options.refine_tol * max(1.0, float(np.linalg.norm(current))):
            converged = True
            break
    if not converged:
        logger.debug("argmin refinement used its full budget")
    return best, condition, converged


def rhs_standard(ansatz: Ansatz, omega: np.ndarray, h: PauliSum, kind: str,
                 options: OdeOptions = OdeOptions()) -> np.ndarray:
    """Parameter velocity from the least-squares route at ``omega``."""
    terms = evaluate_terms(ansatz, omega, h)
    solution, _ = solve_standard(terms, kind, options)
    return solution


def rhs_argmin(ansatz: Ansatz, omega: np.ndarray, h: PauliSum, kind: str,
               options: OdeOptions = OdeOptions()) -> np.ndarray:
    """Parameter velocity from the direct quadratic minimization at ``omega``."""
    terms = evaluate_terms(ansatz, omega, h)
    solution, _, _ = solve_argmin(terms, kind, options)
    return solution


# --- integrators ------------------------------------------------------------

# Dormand-Prince 5(4) tableau
_DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_DP_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_DP_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4: weights of the embedded error estimate
_DP_ERR = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 5.0
_PI_ALPHA = 0.7 / 5.0
_PI_BETA = 0.4 / 5.0


def dopri5_step(f, t: float, y: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """One Dormand-Prince step: (5th-order update, embedded error estimate)."""
    k = np.empty((7, len(y)))
    k[0] = f(t, y)
    for i in range(1, 7):
        k[i] = f(t + _DP_C[i] * h, y + h * (_DP_A[i] @ k[:i]))
    y_new = y + h * (_DP_B5 @ k)
    error = h * (_DP_ERR @ k)
    return y_new, error


@dataclass
class IntegrationResult:
    """Accepted trajectory samples (t_0 included) plus step statistics."""

    times: list[float]
    states: list[np.ndarray]
    step_sizes: list[float]
    n_rejected: int = 0
    n_rhs_evals: int = 0
    monotone_projections: int = 0


def euler_integrate(f, y0: np.ndarray, t_final: float, n_steps: int) -> IntegrationResult:
    """Forward Euler with fixed step t_final / n_steps, left-endpoint rates."""
    if n_steps < 1:
        raise ValueError("n_steps must be at least 1")
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    h = t_final / n_steps
    y = np.array(y0, dtype=float)
    result = IntegrationResult(times=[0.0], states=[y.copy()], step_sizes=[0.0])
    for step in range(n_steps):
        t = step * h
        dy = np.asarray(f(t, y), dtype=float)
        result.n_rhs_evals += 1
        if not np.all(np.isfinite(dy)):
            raise IntegrationError(
                f"non-finite right-hand side at step {step} (t = {t:.6g})",
                records=result,
            )
        y = y + h * dy
        result.times.append((step + 1) * h)
        result.states.append(y.copy())
        result.step_sizes.append(h)
    # pin the endpoint against accumulated roundoff in step * h
    result.times[-1] = t_final
    return result


def rk54_integrate(
    f,
    y0: np.ndarray,
    t_final: float,
    rel_tol: float = 1e-6,
    abs_tol: float = 1e-8,
    nondecreasing_indices: tuple[int, ...] = (),
) -> IntegrationResult:
    """Adaptive Dormand-Prince 5(4) over [0, t_final].

    Error control is componentwise: the RMS of error / (abs_tol + rel_tol
    * |y|) must not exceed one.  Step sizes follow a PI controller.
    Components listed in ``nondecreasing_indices`` are projected to be
    monotone after acceptance (used for the error bound, whose exact rate
    is nonnegative; the 5th-order combination of nonnegative stage rates
    can dip slightly below zero).
    """
    if rel_tol <= 0 or abs_tol <= 0:
        raise ValueError("tolerances must be positive")
    if t_final <= 0:
        raise ValueError("t_final must be positive")
    y = np.array(y0, dtype=float)
    t = 0.0
    result = IntegrationResult(times=[0.0], states=[y.copy()], step_sizes=[0.0])

    f0 = np.asarray(f(0.0, y), dtype=float)
    result.n_rhs_evals += 1
    if not np.all(np.isfinite(f0)):
        raise IntegrationError("non-finite right-hand side at t = 0", records=result)
    scale0 = abs_tol + rel_tol * np.abs(y)
    d0 = math.sqrt(float(np.mean((y / scale0) ** 2)))
    d1 = math.sqrt(float(np.mean((f0 / scale0) ** 2)))
    if d1 == 0.0:
        h = t_final
    else:
        h = min(t_final, max(1e-6 * t_final, 0.01 * max(d0, 1e-5) / d1))

    min_step = 1e-12 * t_final
    err_prev = 1.0
    while t < t_final:
        last = h >= t_final - t
        if last:
            h = t_final - t
        if h < min_step:
            raise IntegrationError(
                f"step size underflow at t = {t:.6g} (h = {h:.3e})", records=result
            )
        y_new, err_vec = dopri5_step(f, t, y, h)
        result.n_rhs_evals += 7
        if not np.all(np.isfinite(y_new)):
            raise IntegrationError(
                f"non-finite state after step at t = {t:.6g}", records=result
            )
        scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = math.sqrt(float(np.mean((err_vec / scale) ** 2)))
        if err <= 1.0:
            t_new = t_final if last else t + h
            for idx in nondecreasing_indices:
                if y_new[idx] < y[idx]:
                    y_new[idx] = y[idx]
                    result.monotone_projections += 1
            result.times.append(t_new)
            result.states.append(y_new.copy())
            result.step_sizes.append(h)
            factor = _SAFETY * (err ** -_PI_ALPHA if err > 0 else _MAX_FACTOR) * (err_prev ** _PI_BETA)
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-10)
            t, y = t_new, y_new
        else:
            result.n_rejected += 1
            factor = _SAFETY * err ** -_PI_ALPHA
            h *= min(1.0, max(_MIN_FACTOR, factor))
    return result
