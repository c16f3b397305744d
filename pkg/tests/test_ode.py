"""ODE right-hand sides, gradient-error quadratic, integrators."""

import numpy as np
import pytest

from varqte.ansatz import all_derivative_states, efficient_su2, initial_parameters
from varqte.mclachlan import McLachlanTerms, evaluate_terms, imag_rhs, real_rhs
from varqte.ode import (
    IntegrationError,
    OdeOptions,
    dopri5_step,
    error_norm_sq,
    euler_integrate,
    rk54_integrate,
    solve_argmin,
    solve_standard,
)
from varqte.pauli import PauliSum, PauliTerm, herm_expm_apply, to_dense

HYDROGEN = PauliSum(
    [
        PauliTerm(0.2252, "II"),
        PauliTerm(0.5716, "ZZ"),
        PauliTerm(0.3435, "IZ"),
        PauliTerm(-0.4347, "ZI"),
        PauliTerm(0.0910, "YY"),
        PauliTerm(0.0910, "XX"),
    ]
)
ILLUSTRATIVE = PauliSum([PauliTerm(1.0, "ZX"), PauliTerm(1.0, "XZ"), PauliTerm(3.0, "ZZ")])


def synthetic_terms(fq, rhs, variance, kind="real"):
    """Build a terms bundle realizing a given (fq, rhs, variance) triple.

    real kind: c = i * rhs with zero overlap gives Im(c) = rhs;
    imag kind: c = -rhs gives -Re(c) = rhs.
    """
    fq = np.asarray(fq, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    c = 1j * rhs if kind == "real" else -rhs.astype(complex)
    return McLachlanTerms(
        fq=fq,
        c=c,
        overlap=np.zeros(len(rhs), dtype=complex),
        energy=0.0,
        h2=variance,
        variance=variance,
    )


# --- error_norm_sq ---------------------------------------------------------------

def test_error_norm_zero_velocity_is_variance():
    a = efficient_su2(2)
    terms = evaluate_terms(a, initial_parameters("illustrative"), ILLUSTRATIVE)
    value = error_norm_sq(terms, np.zeros(a.n_params), "real")
    assert value == pytest.approx(terms.variance, abs=1e-12)
    assert error_norm_sq(terms, np.zeros(a.n_params), "imag") == pytest.approx(
        terms.variance, abs=1e-12
    )


def test_error_norm_at_exact_solution_closed_form():
    # invertible F: minimum value is Var - rhs^T F^{-1} rhs
    rng = np.random.default_rng(41)
    m = rng.normal(size=(4, 4))
    fq = m @ m.T + 0.5 * np.eye(4)
    rhs = rng.normal(size=4)
    var = 7.0
    terms = synthetic_terms(fq, rhs, var)
    w = np.linalg.solve(fq, rhs)
    expected = var - rhs @ np.linalg.solve(fq, rhs)
    assert error_norm_sq(terms, w, "real") == pytest.approx(expected, rel=1e-10)


def test_error_norm_hydrogen_trajectory_certified_zero():
    a = efficient_su2(2)
    omega = initial_parameters("hydrogen")
    terms = evaluate_terms(a, omega, HYDROGEN)
    w, _, _ = solve_argmin(terms, "imag", OdeOptions(kind="argmin"))
    assert error_norm_sq(terms, w, "imag") <= 1e-12


def test_error_norm_matches_explicit_residual_vector():
    # assemble e = sum_j w_j d_j psi - i nu psi + i H psi explicitly (real kind)
    rng = np.random.default_rng(42)
    a = efficient_su2(2)
    for _ in range(10):
        omega = rng.uniform(-np.pi, np.pi, size=a.n_params)
        w = rng.normal(size=a.n_params)
        terms = evaluate_terms(a, omega, HYDROGEN)
        psi, dpsi = all_derivative_states(a, omega)
        psi_dot = dpsi.T @ w
        m = to_dense(HYDROGEN)
        nu_dot = terms.energy + float(np.imag(np.vdot(psi, psi_dot)))
        residual = psi_dot - 1j * nu_dot * psi + 1j * (m @ psi)
        explicit = float(np.real(np.vdot(residual, residual)))
        assert error_norm_sq(terms, w, "real") == pytest.approx(explicit, abs=1e-8)


def test_error_norm_imag_matches_explicit_residual_vector():
    rng = np.random.default_rng(43)
    a = efficient_su2(2)
    for _ in range(10):
        omega = rng.uniform(-np.pi, np.pi, size=a.n_params)
        w = rng.normal(size=a.n_params)
        terms = evaluate_terms(a, omega, HYDROGEN)
        psi, dpsi = all_derivative_states(a, omega)
        psi_dot = dpsi.T @ w
        m = to_dense(HYDROGEN)
        nu_dot = -float(np.imag(np.vdot(psi_dot, psi)))
        residual = psi_dot - 1j * nu_dot * psi - (terms.energy * psi - m @ psi)
        explicit = float(np.real(np.vdot(residual, residual)))
        assert error_norm_sq(terms, w, "imag") == pytest.approx(explicit, abs=1e-8)


def test_error_norm_strongly_negative_raises():
    terms = synthetic_terms(np.zeros((2, 2)), [1.0, 0.0], 0.0)
    with pytest.raises(ArithmeticError):
        error_norm_sq(terms, np.array([10.0, 0.0]), "real")


# --- solvers ----------------------------------------------------------------------

def test_solve_standard_identity_metric():
    rhs = np.array([0.3, -0.7, 0.1])
    terms = synthetic_terms(np.eye(3), rhs, 1.0)
    w, cond = solve_standard(terms, "real", OdeOptions())
    np.testing.assert_allclose(w, rhs, atol=1e-12)
    assert cond == pytest.approx(1.0)


def test_solve_standard_singular_in_range():
    u = np.array([1.0, 2.0, 2.0]) / 3.0
    fq = np.outer(u, u)  # rank one
    rhs = 0.8 * u  # in the range of fq
    terms = synthetic_terms(fq, rhs, 1.0)
    w, cond = solve_standard(terms, "real", OdeOptions())
    assert np.linalg.norm(fq @ w - rhs) <= 1e-10
    assert cond > 1e10  # rank deficient: observably ill-conditioned


def test_solve_standard_illustrative_finite():
    terms = evaluate_terms(efficient_su2(2), initial_parameters("illustrative"), ILLUSTRATIVE)
    w, _ = solve_standard(terms, "real", OdeOptions())
    assert np.all(np.isfinite(w))


def test_argmin_agrees_with_standard_when_well_conditioned():
    rng = np.random.default_rng(44)
    m = rng.normal(size=(5, 5))
    fq = m @ m.T + np.eye(5)
    rhs = rng.normal(size=5)
    terms = synthetic_terms(fq, rhs, 2.0)
    w_std, _ = solve_standard(terms, "real", OdeOptions())
    w_min, _, converged = solve_argmin(terms, "real", OdeOptions(kind="argmin"))
    assert converged
    np.testing.assert_allclose(w_min, w_std, atol=1e-8)


def test_argmin_zero_problem():
    terms = synthetic_terms(np.zeros((3, 3)), np.zeros(3), 4.0)
    w, _, _ = solve_argmin(terms, "real", OdeOptions(kind="argmin"))
    np.testing.assert_allclose(w, 0.0)
    assert error_norm_sq(terms, w, "real") == pytest.approx(4.0)


def test_argmin_dominates_on_ill_conditioned_metric():
    rng = np.random.default_rng(45)
    basis, _ = np.linalg.qr(rng.normal(size=(6, 6)))
    spectrum = np.array([1.0, 0.5, 1e-4, 1e-8, 1e-12, 1e-13])
    fq = basis @ np.diag(spectrum) @ basis.T
    fq = 0.5 * (fq + fq.T)
    assert np.linalg.cond(fq) > 1e10
    g = rng.normal(size=6)
    rhs = fq @ g  # consistent system
    # variance above the quadratic's minimum keeps the bundle realizable
    terms = synthetic_terms(fq, rhs, float(g @ fq @ g) + 1.0)
    w_std, _ = solve_standard(terms, "real", OdeOptions())
    w_min, _, _ = solve_argmin(terms, "real", OdeOptions(kind="argmin"))
    assert (
        error_norm_sq(terms, w_min, "real")
        <= error_norm_sq(terms, w_std, "real") + 1e-12
    )


def test_argmin_dominance_on_preset_points():
    rng = np.random.default_rng(46)
    a = efficient_su2(2)
    options = OdeOptions(kind="argmin")
    for kind in ("real", "imag"):
        for _ in range(10):
            omega = rng.uniform(-np.pi, np.pi, size=a.n_params)
            terms = evaluate_terms(a, omega, ILLUSTRATIVE)
            w_std, _ = solve_standard(terms, kind, options)
            w_min, _, _ = solve_argmin(terms, kind, options)
            assert (
                error_norm_sq(terms, w_min, kind)
                <= error_norm_sq(terms, w_std, kind) + 1e-12
            )


# --- forward Euler -----------------------------------------------------------------

def test_euler_constant_rhs_exact():
    result = euler_integrate(lambda t, y: np.array([2.0]), np.array([1.0]), 3.0, 10)
    assert result.states[-1][0] == pytest.approx(7.0, abs=1e-12)


def test_euler_scalar_decay_closed_form():
    n = 100
    result = euler_integrate(lambda t, y: -y, np.array([1.0]), 1.0, n)
    assert result.states[-1][0] == pytest.approx((1 - 1 / n) ** n, rel=1e-12)


def test_euler_first_order_convergence():
    exact = np.exp(-1.0)
    errors = []
    for n in (100, 200):
        out = euler_integrate(lambda t, y: -y, np.array([1.0]), 1.0, n)
        errors.append(abs(out.states[-1][0] - exact))
    ratio = errors[0] / errors[1]
    assert ratio == pytest.approx(2.0, rel=0.1)


def test_euler_aborts_on_nonfinite():
    def bad(t, y):
        return np.array([np.nan])

    with pytest.raises(IntegrationError, match="step 0"):
        euler_integrate(bad, np.array([1.0]), 1.0, 4)


# --- RK54 ---------------------------------------------------------------------------

def test_rk54_scalar_decay_within_tolerance():
    for rel in (1e-6, 1e-8):
        out = rk54_integrate(lambda t, y: -y, np.array([1.0]), 1.0, rel_tol=rel, abs_tol=rel * 1e-2)
        err = abs(out.states[-1][0] - np.exp(-1.0))
        assert err <= 10 * (rel * 1e-2 + rel * np.exp(-1.0))


def test_rk54_linear_system_matches_expm_oracle():
    h = ILLUSTRATIVE
    m = to_dense(h)
    # real antisymmetric generator from the Hermitian matrix: y' = A y with
    # A = [[Im, Re], [-Re, -Im]]-style real embedding of -i H
    a_real = np.block([[m.imag, m.real], [-m.real, m.imag]])

    def f(t, y):
        return a_real @ y

    y0 = np.zeros(8)
    y0[0] = 1.0
    out = rk54_integrate(f, y0, 1.0, rel_tol=1e-9, abs_tol=1e-12)
    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    oracle = herm_expm_apply(h, -1j * 1.0, psi0)
    got = out.states[-1][:4] + 1j * out.states[-1][4:]
    np.testing.assert_allclose(got, oracle, atol=1e-7)


def test_rk54_zero_rhs_single_step():
    out = rk54_integrate(lambda t, y: np.zeros_like(y), np.array([1.0, -2.0]), 5.0)
    assert len(out.times) == 2
    assert out.times[-1] == 5.0
    np.testing.assert_allclose(out.states[-1], [1.0, -2.0])


def test_rk54_fixed_step_order_five():
    # propagate y' = -y with fixed h through the raw Dormand-Prince step;
    # the observed order of the 5th-order formula must exceed 4.5
    exact = np.exp(-1.0)
    errors = []
    steps = (8, 16, 32)
    for n in steps:
        h = 1.0 / n
        y = np.array([1.0])
        t = 0.0
        for _ in range(n):
            y, _ = dopri5_step(lambda tt, yy: -yy, t, y, h)
            t += h
        errors.append(abs(y[0] - exact))
    orders = [
        np.log(errors[i] / errors[i + 1]) / np.log(steps[i + 1] / steps[i])
        for i in range(len(steps) - 1)
    ]
    assert min(orders) >= 4.5


def test_rk54_tolerance_sweep_monotone():
    errors = []
    for rel in (1e-6, 1e-8, 1e-10):
        out = rk54_integrate(lambda t, y: -y, np.array([1.0]), 1.0, rel_tol=rel, abs_tol=rel * 1e-2)
        errors.append(abs(out.states[-1][0] - np.exp(-1.0)))
    assert errors[0] > errors[2]


def test_rk54_step_underflow_aborts():
    # y' = y^2 from y0 = 2 blows up at t = 0.5; the controller must give up
    with pytest.raises(IntegrationError, match="underflow|non-finite"):
        rk54_integrate(lambda t, y: y * y, np.array([2.0]), 1.0)


def test_rk54_monotone_projection():
    # a rate that dips negative: the projected component must never decrease
    def f(t, y):
        return np.array([np.cos(8 * t)])

    out = rk54_integrate(f, np.array([0.0]), 2.0, nondecreasing_indices=(-1,))
    values = [s[0] for s in out.states]
    assert all(b >= a for a, b in zip(values, values[1:]))
