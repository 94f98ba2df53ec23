import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from willmorekit.avr import (
    estimate_avr,
    outward_tube_volume,
    sphere_ball_constants,
    volume_ratio,
    volume_ratio_integral_form,
    volume_ratio_samples,
    tube_volume,
)
from willmorekit.errors import MethodDisagreement
from willmorekit.manifold import builtin

from oracles import SCHW_THETA_M2, SCHW_TUBE_M2, schwarzschild_tube_volume


def test_sphere_ball_constants_textbook():
    assert sphere_ball_constants(3) == pytest.approx((4 * math.pi, 4 * math.pi / 3), rel=1e-15)
    assert sphere_ball_constants(2) == pytest.approx((2 * math.pi, math.pi), rel=1e-15)


@given(n=st.integers(1, 400))
def test_sphere_area_is_n_times_ball_volume(n):
    area, ball = sphere_ball_constants(n)
    assert area == pytest.approx(n * ball, rel=1e-14)


def test_large_dimensions_underflow_gracefully():
    area, ball = sphere_ball_constants(5000)
    assert area == 0.0 and ball == 0.0


def test_cone_tube_volume(unit_cone):
    assert tube_volume(unit_cone, 1.0) == pytest.approx(4 * math.pi * 7 / 3, rel=1e-13)


def test_schwarzschild_tube_volume_matches_closed_form(schwarzschild2):
    from oracles import schwarzschild_coordinate
    for R, expected in SCHW_TUBE_M2.items():
        assert tube_volume(schwarzschild2, R) == pytest.approx(expected, rel=1e-6)
    # Independent route: the closed form at s = h(R).
    s = float(schwarzschild2.h(10.0))
    assert schwarzschild_coordinate(s, 2.0) == pytest.approx(10.0, rel=1e-9)
    assert schwarzschild_tube_volume(s, 2.0) == pytest.approx(SCHW_TUBE_M2[10.0], rel=1e-8)


def test_small_tubes_follow_first_order_taylor(schwarzschild2, half_cone):
    for W in (schwarzschild2, half_cone):
        R = 1e-6
        first = W.fiber.area * W.h(0.0) ** (W.n - 1)
        assert tube_volume(W, R) / R == pytest.approx(first, rel=1e-5)


def test_outward_tube_is_additive(schwarzschild2):
    whole = outward_tube_volume(schwarzschild2, 0.0, 5.0)
    split = outward_tube_volume(schwarzschild2, 0.0, 2.0) + outward_tube_volume(schwarzschild2, 2.0, 3.0)
    assert whole == pytest.approx(split, rel=1e-12)


def test_cone_volume_ratio(unit_cone):
    assert volume_ratio(unit_cone, 3.0) == pytest.approx(21.0 / 9.0, rel=1e-13)
    assert volume_ratio_integral_form(unit_cone, 3.0) == pytest.approx(21.0 / 9.0, rel=1e-12)
    assert volume_ratio(unit_cone, 1e6) == pytest.approx(1.0, rel=1e-5)


def test_schwarzschild_volume_ratio_samples(schwarzschild2):
    for R, val in volume_ratio_samples(schwarzschild2, SCHW_THETA_M2):
        assert val == pytest.approx(SCHW_THETA_M2[R], rel=1e-6)


@pytest.mark.parametrize("m", [1.0, 2.0, 5.0])
def test_schwarzschild_avr_is_one(m):
    est = estimate_avr(builtin("schwarzschild", mass=m))
    assert est.value == pytest.approx(1.0, abs=1e-4)
    assert est.error_estimate < 1e-4


def test_cone_avr(unit_cone, half_cone):
    assert estimate_avr(unit_cone).value == pytest.approx(1.0, abs=1e-12)
    assert estimate_avr(half_cone).value == pytest.approx(0.25, abs=1e-6)


def test_two_estimators_agree_on_builtins(schwarzschild2, rn31, unit_cone, half_cone):
    for W in (schwarzschild2, rn31, unit_cone, half_cone, builtin("modified-schwarzschild")):
        est = estimate_avr(W)
        alt, alt_err = est.alternative
        assert abs(est.value - alt) <= est.error_estimate + alt_err + 1e-12


def test_disagreement_is_reported():
    from willmorekit.manifold import FiberManifold, LogWarp, WarpedProduct
    # h = 1 + r but with a derivative claiming h' = 2: the slope estimator
    # sees 4 and the tube estimator sees 1.
    warp = LogWarp(lambda r: np.log1p(np.asarray(r, dtype=float)),
                   lambda r: 2.0 / (1.0 + np.asarray(r, dtype=float)),
                   lambda r: -2.0 / (1.0 + np.asarray(r, dtype=float)) ** 2)
    W = WarpedProduct(FiberManifold.round_sphere(2), warp, "inconsistent")
    with pytest.raises(MethodDisagreement):
        estimate_avr(W)
    assert estimate_avr(W, cross_check=False).value > 0


@settings(max_examples=20, deadline=None)
@given(a=st.floats(0.05, 1.0), b=st.floats(0.1, 5.0), scale=st.floats(0.5, 4.0))
def test_cone_avr_is_slope_power(a, b, scale):
    from willmorekit.manifold import cone
    W = cone(a, b)
    W = W.with_fiber(W.fiber.scaled_area(scale))
    est = estimate_avr(W)
    assert est.value == pytest.approx(scale * a * a, rel=1e-6)


@settings(max_examples=20, deadline=None)
@given(R=st.floats(0.01, 1e4))
def test_volume_ratio_forms_agree(schwarzschild2, R):
    assert volume_ratio(schwarzschild2, R) == pytest.approx(
        volume_ratio_integral_form(schwarzschild2, R), rel=1e-10)


def test_cone_volume_ratio_is_nonincreasing(unit_cone, half_cone):
    for W in (unit_cone, half_cone):
        vals = [volume_ratio(W, R) for R in np.geomspace(1.0, 1e6, 13)]
        assert np.all(np.diff(vals) <= 0)
