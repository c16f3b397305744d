"""A-posteriori error-bound rates for variational time evolution.

Real time: the Bures distance to the exact evolution grows at most at the
gradient-error rate, d eps/dt = ||e_t||.

Imaginary time: the one-step bound combines three pieces,

    eps(t + d) = d*||e_t|| + d*zeta(omega, eps) + sqrt(2 + 2 d zeta - 2 chi),

where zeta bounds |E(prepared) - E(exact)| given a Bures distance eps
(one-dimensional maximization over a mixing parameter) and chi lower
bounds the overlap of the two states after one non-unitary step
(one-dimensional constrained minimization).  The rate used by the joint
ODE is the finite difference (eps(t+d) - eps)/d at a small fixed d,
independent of the integrator step size.

Both one-dimensional searches run on a uniform grid with a refinement
pass (golden section around the incumbent, plus bisection onto the
feasibility boundary for chi, where the constrained minimum typically
sits).  The chi objective is arranged so that alpha = 0 evaluates to
exactly 1.0 in floating point; together with the rounding-aware zero
floor in ``varqte.ode.error_norm_sq`` this makes eps = 0 an exact fixed
point whenever the ansatz represents the flow exactly.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .mclachlan import McLachlanTerms
from .ode import error_norm_sq

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2.0)
DEFAULT_GRID_POINTS = 10001
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BoundIncrement:
    """One Theorem-2 step: gradient error, zeta, chi, next bound and rate."""

    grad_error_norm: float
    zeta: float
    chi: float
    epsilon_next: float
    rate: float
    raw_rate: float
    radicand_clamped: bool


def qrte_rate(terms: McLachlanTerms, omega_dot: np.ndarray) -> float:
    """Real-time bound rate: the gradient-error norm itself."""
    return math.sqrt(error_norm_sq(terms, omega_dot, "real"))


def _golden_section(f, lo: float, hi: float, iters: int = 72) -> tuple[float, float]:
    """Minimize f on [lo, hi]; returns the best (x, f(x)) among all evaluations.

    Tolerates +inf plateaus (infeasible regions) by tracking the best seen
    point instead of trusting strict unimodality.
    """
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
        for x, fx in ((c, fc), (d, fd)):
            if fx < best_f:
                best_x, best_f = x, fx
    return best_x, best_f


def zeta(terms: McLachlanTerms, eps: float, h_norm: float,
         grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Energy-difference bound at Bures distance ``eps``.

    eps^2 * ||H|| plus twice the maximum of
    |alpha E - sqrt(1 - (1-alpha)^2) sqrt(Var)| over alpha in
    [0, min(eps^2/2, 1)].  Monotone in eps (the feasible interval grows);
    zero at eps = 0.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    if eps == 0.0:
        return 0.0
    energy = terms.energy
    std = math.sqrt(max(terms.variance, 0.0))
    a_max = min(eps * eps / 2.0, 1.0)

    def objective(alpha: float) -> float:
        return abs(alpha * energy - math.sqrt(max(alpha * (2.0 - alpha), 0.0)) * std)

    alphas = np.linspace(0.0, a_max, grid_points)
    values = np.abs(alphas * energy - np.sqrt(np.clip(alphas * (2.0 - alphas), 0.0, None)) * std)
    best = int(np.argmax(values))
    max_val = float(values[best])
    lo = alphas[max(best - 1, 0)]
    hi = alphas[min(best + 1, grid_points - 1)]
    if hi > lo:
        _, neg = _golden_section(lambda a: -objective(a), lo, hi)
        max_val = max(max_val, -neg)
    return eps * eps * h_norm + 2.0 * max_val


def _chi_pieces(alpha, energy: float, h2: float, var: float, delta: float):
    """nu, c_alpha, objective numerator for the overlap bound (vectorized).

    The numerator is arranged as nu + 2*delta*(E*nu - w) so that at
    alpha = 0 the delta terms cancel exactly in floating point and the
    objective is exactly 1.
    """
    abs_a = np.abs(alpha)
    nu = 1.0 - abs_a + alpha * energy
    w = (1.0 - abs_a) * energy + alpha * h2
    numerator = nu + 2.0 * delta * (energy * nu - w)
    c = np.sqrt(np.clip(nu * nu + alpha * alpha * var, 0.0, None))
    return nu, c, numerator


def chi(terms: McLachlanTerms, eps: float, delta: float,
        grid_points: int = DEFAULT_GRID_POINTS) -> float:
    """Worst-case overlap of prepared and exact state after one small step.

    Minimizes |(1 + 2 delta E)(1 - |a| + a E) - 2 delta ((1-|a|) E + a <H^2>)| / c_a
    over a in [-1, 1] subject to |1 - |a| + a E| >= c_a (1 - eps^2/2).
    a = 0 is always feasible and evaluates to exactly 1, so chi <= 1.
    Grid points with c_a <= 1e-12 are skipped.  The feasibility boundary
    (where the constrained minimum usually sits) is located by bisection
    between adjacent grid points; a golden-section pass refines around the
    incumbent.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    energy = terms.energy
    h2 = terms.h2
    var = max(terms.variance, 0.0)
    threshold = 1.0 - 0.5 * eps * eps
    # |nu| >= c * threshold squared and rearranged: nu^2 (1 - thr^2) >= a^2 var thr^2
    # with 1 - thr^2 evaluated as eps^2 (1 - eps^2/4).  The rearrangement is
    # exact at eps = 0 (only alpha = 0 feasible), whereas c == |nu| within
    # rounding for tiny alpha and the direct comparison would leak
    # infeasible points into the minimization.
    slack = eps * eps * (1.0 - 0.25 * eps * eps)

    def _feasible(alpha, nu, c):
        if threshold <= 0.0:
            return np.ones_like(np.asarray(alpha), dtype=bool)
        return nu * nu * slack >= (alpha * alpha) * var * (threshold * threshold)

    alphas = np.linspace(-1.0, 1.0, grid_points)
    nu, c, numerator = _chi_pieces(alphas, energy, h2, var, delta)
    valid = c > 1e-12
    feasible = valid & _feasible(alphas, nu, c)
    objective = np.full_like(alphas, np.inf)
    objective[valid] = np.abs(numerator[valid]) / c[valid]

    def scalar_objective(a: float) -> float:
        nu_s, c_s, num_s = _chi_pieces(np.float64(a), energy, h2, var, delta)
        if c_s <= 1e-12 or not _feasible(np.float64(a), nu_s, c_s):
            return math.inf
        return abs(num_s) / c_s

    masked = np.where(feasible, objective, np.inf)
    best = int(np.argmin(masked))
    candidates = [float(masked[best])]

    # refine around the incumbent
    lo = alphas[max(best - 1, 0)]
    hi = alphas[min(best + 1, grid_points - 1)]
    if hi > lo:
        _, val = _golden_section(scalar_objective, lo, hi)
        candidates.append(val)

    # locate feasibility boundaries: constrained minima sit where the
    # constraint becomes active, which generally falls between grid points
    if threshold > 0.0:
        flips = np.nonzero(feasible[:-1] != feasible[1:])[0]
        for i in flips[:64]:
            a_feas, a_infeas = alphas[i], alphas[i + 1]
            if not feasible[i]:
                a_feas, a_infeas = a_infeas, a_feas
            for _ in range(80):
                mid = 0.5 * (a_feas + a_infeas)
                if math.isfinite(scalar_objective(mid)):
                    a_feas = mid
                else:
                    a_infeas = mid
            candidates.append(scalar_objective(a_feas))

    value = min(candidates)
    if not math.isfinite(value):
        raise ArithmeticError("overlap bound found no feasible point (alpha = 0 should be)")
    return value


def qite_increment(
    terms: McLachlanTerms,
    omega_dot: np.ndarray,
    eps: float,
    delta: float,
    h_norm: float,
    grid_points: int = DEFAULT_GRID_POINTS,
) -> BoundIncrement:
    """Theorem-2 step at finite delta and the finite-difference rate.

    The radicand 2 + 2 delta zeta - 2 chi is clamped at zero; values below
    -1e-9 are flagged as numerically inconsistent.  The rate is clamped
    nonnegative (the bound never shrinks), keeping the raw value for
    diagnostics.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    grad_error = math.sqrt(error_norm_sq(terms, omega_dot, "imag"))
    z = zeta(terms, eps, h_norm, grid_points)
    x = chi(terms, eps, delta, grid_points)
    radicand = 2.0 + 2.0 * delta * z - 2.0 * x
    clamped = False
    if radicand < 0.0:
        if radicand < -1e-9:
            logger.warning("bound radicand %.3e below clamp threshold", radicand)
        radicand = 0.0
        clamped = True
    eps_next = delta * grad_error + delta * z + math.sqrt(radicand)
    raw_rate = (eps_next - eps) / delta
    return BoundIncrement(
        grad_error_norm=grad_error,
        zeta=z,
        chi=x,
        epsilon_next=eps_next,
        rate=max(0.0, raw_rate),
        raw_rate=raw_rate,
        radicand_clamped=clamped,
    )


def fidelity_bound(eps: float) -> tuple[float, float]:
    """(rigorous, first-order) fidelity lower bounds at Bures bound ``eps``.

    From B^2 = 2 - 2|<a|b>| <= eps^2 the overlap satisfies
    |<a|b>| >= 1 - eps^2/2, hence fidelity >= max(0, 1 - eps^2/2)^2; the
    unsquared 1 - eps^2/2 form is reported alongside for comparison.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    overlap = max(0.0, 1.0 - 0.5 * eps * eps)
    return overlap * overlap, 1.0 - 0.5 * eps * eps


def clip_report(eps: float) -> float:
    """Clip a bound to its meaningful range [0, sqrt(2)] for reporting."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    return min(eps, SQRT2)
