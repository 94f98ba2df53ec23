import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from willmorekit.errors import (
    AccuracyNotReached,
    InsufficientSamples,
    NonFiniteCoefficient,
    NonFiniteIntegrand,
    NonMonotoneTail,
    TailNotConvergent,
)
from willmorekit.numerics import (
    TailHint,
    central_derivative,
    extrapolate_limit,
    integrate,
    solve_first_order,
    solve_ivp,
)

from oracles import COSH_1


# -- ODE kernel -----------------------------------------------------------------

def test_zero_coefficient_gives_the_line():
    traj = solve_ivp(lambda t: 0.0, 1.0, 0.5, 2.0)
    # The RK arithmetic may leave one ulp of round-off.
    assert traj(2.0) == pytest.approx(2.0, rel=1e-14, abs=0)
    assert traj.derivative(2.0) == pytest.approx(0.5, rel=1e-14)


def test_unit_coefficient_gives_cosh():
    traj = solve_ivp(lambda t: 1.0, 1.0, 0.0, 1.0, rel_tol=1e-10)
    assert abs(traj(1.0) - COSH_1) <= 1e-10 * COSH_1
    assert traj.derivative(1.0) == pytest.approx(math.sinh(1.0), rel=1e-10)


def test_horizon_jacobi_field_matches_first_order_warp():
    # h' = sqrt(1 - m/h) from h(0) = m is awkward at the root; integrate
    # u = sqrt(h - m) instead, u' = 1/(2 sqrt(h)), independently of the library.
    m = 2.0
    _, _, dense = solve_first_order(lambda t, u: [0.5 / math.sqrt(m + u[0] ** 2)],
                                    [0.0], 5.0, rel_tol=1e-13, abs_tol=1e-15)
    h5 = m + float(dense(5.0)[0, 0]) ** 2

    def lam(t):
        h = m + float(np.ravel(dense(t))[0]) ** 2
        return m / (2.0 * h ** 3)

    traj = solve_ivp(lam, 1.0, 0.0, 5.0, rel_tol=1e-10)
    assert abs(traj(5.0) - h5 / m) <= 10 * 1e-10 * h5 / m


def test_stored_grid_values_are_returned_verbatim():
    traj = solve_ivp(lambda t: 1.0 / (1.0 + t) ** 3, 1.0, 0.3, 10.0)
    np.testing.assert_array_equal(traj(traj.grid), traj.values)
    np.testing.assert_array_equal(traj.derivative(traj.grid), traj.derivatives)


def test_evaluation_outside_the_range_raises():
    traj = solve_ivp(lambda t: 0.0, 1.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        traj(1.5)


def test_non_finite_coefficient_is_reported():
    with pytest.raises(NonFiniteCoefficient):
        solve_ivp(lambda t: math.inf if t > 0.5 else 0.0, 1.0, 0.0, 1.0)


def test_breakpoints_keep_accuracy_across_a_kink():
    a = 2.0
    lam = lambda t: max(0.0, 1.0 - t / a)
    with_bp = solve_ivp(lam, 1.0, 0.0, 6.0, breakpoints=(a,))
    fine = solve_ivp(lam, 1.0, 0.0, 6.0, rel_tol=1e-12, breakpoints=(a, a))
    assert with_bp(6.0) == pytest.approx(fine(6.0), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.05, 3.0), p=st.floats(3.0, 6.0), k=st.floats(0.0, 2.0),
       t=st.floats(0.05, 20.0))
def test_dense_derivative_matches_finite_differences(c, p, k, t):
    traj = solve_ivp(lambda s: c * (1.0 + s) ** (-p), 1.0, k, 25.0, rel_tol=1e-12)
    step = 1e-3
    fd = float(central_derivative(traj, np.array([t]), step)[0])
    d = traj.derivative(t)
    assert abs(fd - d) <= 1e-6 * max(1.0, abs(d))


@settings(max_examples=25, deadline=None)
@given(c=st.floats(0.0, 4.0), t=st.floats(0.1, 3.0))
def test_constant_coefficient_matches_hyperbolic_oracle(c, t):
    traj = solve_ivp(lambda s: c, 1.0, 0.0, 3.0, rel_tol=1e-11)
    expected = math.cosh(math.sqrt(c) * t)
    assert traj(t) == pytest.approx(expected, rel=1e-9)


# -- quadrature -----------------------------------------------------------------

def test_inverse_cube_tail_integral():
    res = integrate(lambda t: (1.0 + t) ** -3, 0.0, math.inf, tail_hint=TailHint(exponent=3))
    assert res.value == pytest.approx(0.5, rel=1e-9)
    assert res.truncation_point is not None


def test_first_moment_integral():
    res = integrate(lambda t: t * (1.0 + t) ** -3, 0.0, math.inf, tail_hint=TailHint(exponent=2))
    assert res.value == pytest.approx(0.5, rel=1e-9)


def test_zero_integrand():
    assert integrate(lambda t: 0.0, 0.0, math.inf).value == 0.0


def test_compact_support_hint_truncates_exactly():
    res = integrate(lambda t: max(0.0, 1.0 - t / 3.0), 0.0, math.inf,
                    tail_hint=TailHint(support=3.0))
    assert res.value == pytest.approx(1.5, rel=1e-13)
    assert res.truncation_point is None


def test_empty_range():
    assert integrate(lambda t: 1.0, 2.0, 2.0).value == 0.0


def test_non_finite_integrand_is_reported():
    with pytest.raises(NonFiniteIntegrand):
        integrate(lambda t: math.nan, 0.0, 1.0)


def test_slowly_decaying_tail_does_not_converge():
    with pytest.raises(TailNotConvergent):
        integrate(lambda t: 1.0 / (1.0 + t), 0.0, math.inf, max_doublings=20)


def test_unreachable_accuracy_is_reported():
    with pytest.raises(AccuracyNotReached):
        integrate(lambda t: math.sin(1.0 / t) / t, 1e-12, 1.0, abs_tol=1e-15)


@settings(max_examples=30, deadline=None)
@given(p=st.floats(2.2, 8.0), c=st.floats(0.01, 10.0))
def test_power_law_integrals_match_closed_form(p, c):
    res = integrate(lambda t: c * (1.0 + t) ** -p, 0.0, math.inf, abs_tol=1e-12,
                    tail_hint=TailHint(exponent=p))
    assert res.value == pytest.approx(c / (p - 1.0), rel=1e-9)


@settings(max_examples=30, deadline=None)
@given(deg=st.integers(0, 6), b=st.floats(0.1, 50.0))
def test_polynomial_integrals_match_closed_form(deg, b):
    res = integrate(lambda t: t ** deg, 0.0, b, abs_tol=1e-300, rel_tol=1e-13)
    assert res.value == pytest.approx(b ** (deg + 1) / (deg + 1), rel=1e-9)


# -- extrapolation ---------------------------------------------------------------

def test_exact_power_model_is_recovered():
    samples = [(R, 1.0 + 1.0 / R) for R in (10.0, 20.0, 40.0)]
    limit, err = extrapolate_limit(samples)
    assert abs(limit - 1.0) <= 1e-6


def test_constant_sequence():
    limit, err = extrapolate_limit([(R, 0.25) for R in (10.0, 20.0, 40.0)])
    assert limit == 0.25
    assert err == 0.0


def test_log_power_model_removes_log_corrections():
    samples = [(R, 2.0 + 3.0 * math.log(R) / R - 5.0 / R) for R in (1e2, 1e3, 1e4)]
    limit, _ = extrapolate_limit(samples, "log-power")
    assert limit == pytest.approx(2.0, abs=1e-12)


def test_two_samples_are_not_enough():
    with pytest.raises(InsufficientSamples):
        extrapolate_limit([(1.0, 1.0), (2.0, 1.0)])


def test_irregular_radii_are_rejected():
    with pytest.raises(ValueError):
        extrapolate_limit([(1.0, 1.0), (2.0, 1.0), (5.0, 1.0)])


def test_pre_asymptotic_samples_are_reported():
    # 1/R and 1/R^2 are the same size at R = 1, so the second correction
    # is larger than the first.
    samples = [(R, 1.0 / R - 1.0 / R ** 2) for R in (1.0, 2.0, 4.0)]
    with pytest.raises(NonMonotoneTail):
        extrapolate_limit(samples)


@settings(max_examples=40, deadline=None)
@given(L=st.floats(-10, 10), a=st.floats(0.1, 5), sign=st.sampled_from([-1.0, 1.0]),
       b=st.floats(-1, 1), R0=st.floats(1e3, 1e5), q=st.sampled_from([2.0, 4.0, 10.0]))
def test_two_term_power_models_extrapolate_exactly(L, a, sign, b, R0, q):
    # Asymptotic regime: the 1/R term dominates the 1/R^2 term.
    a *= sign
    radii = [R0 * q ** i for i in range(3)]
    samples = [(R, L + a / R + b / R ** 2) for R in radii]
    limit, _ = extrapolate_limit(samples)
    assert limit == pytest.approx(L, abs=1e-9 * max(1.0, abs(L), abs(a), abs(b)))
