import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from willmorekit.associated import AssociatedFunction
from willmorekit.comparison import DecayConstants, decay_constants
from willmorekit.errors import ConditionsFailed, MissingFiberDiameter
from willmorekit.manifold import FiberManifold, JacobiWarp, LogWarp, WarpedProduct, builtin
from willmorekit.willmore import (
    rigidity_checks,
    equality_limit_ratio,
    equality_w1_check,
    minimal_area_bound,
    prepare,
    reduced_lhs,
    slice_functional,
    slice_functional_derivative,
    slice_functional_root,
    slice_data,
    verify_inequality,
    willmore_lhs,
)

from oracles import (
    SCHW_B0,
    SCHW_HORIZON_LHS_M2,
    SCHW_LIMIT_RATIO,
    SCHW_MIN_AREA_BOUND,
    schwarzschild_coordinate,
)


def jacobi_product(c, k=0.5, support=2.0):
    lam = AssociatedFunction.triangular(c, support)
    return WarpedProduct(FiberManifold.round_sphere(2), JacobiWarp(lam, k, 10.0), "jacobi"), lam


# -- left-hand sides ----------------------------------------------------------------

def test_cone_reduced_lhs(unit_cone):
    assert reduced_lhs(unit_cone, slice_data(unit_cone, 0.0)) == pytest.approx(4 * math.pi, abs=1e-12)


def test_schwarzschild_horizon_lhs(schwarzschild2_ctx):
    ctx = schwarzschild2_ctx
    lhs = willmore_lhs(ctx.W, slice_data(ctx.W, 0.0), ctx.constants)
    assert lhs == pytest.approx(SCHW_HORIZON_LHS_M2, rel=1e-8)


def test_minimal_slice_lhs_formula():
    W = builtin("reissner-nordstrom", mass=4.0, charge=1.5)
    c = DecayConstants(0.3, 0.2)
    slc = slice_data(W, 0.0)
    assert abs(slc.mean_ratio) < 1e-9
    expected = math.exp(2 * 0.3) * slc.area * 0.2 ** 2
    assert willmore_lhs(W, slc, c) == pytest.approx(expected, rel=1e-8)


# -- verification -------------------------------------------------------------------

def test_cone_equality(unit_cone):
    rep = verify_inequality(unit_cone, 0.0)
    assert abs(rep.gap) <= 1e-6
    assert rep.lhs == pytest.approx(4 * math.pi, abs=1e-8)
    assert rep.equality_class == "equality-W1"
    assert rep.r0_star == pytest.approx(1.0, rel=1e-9)


def test_half_cone_equality(half_cone):
    rep = verify_inequality(half_cone, 0.0)
    assert rep.lhs == pytest.approx(math.pi, abs=1e-6)
    assert rep.rhs == pytest.approx(math.pi, abs=1e-6)
    assert rep.equality_class == "equality-W1"
    assert rep.r0_star == pytest.approx(2.0, rel=1e-6)


def test_schwarzschild_horizon_is_strict(schwarzschild2_ctx):
    rep = verify_inequality(schwarzschild2_ctx.W, 0.0, schwarzschild2_ctx)
    assert rep.lhs == pytest.approx(SCHW_HORIZON_LHS_M2, rel=1e-8)
    assert rep.rhs == pytest.approx(4 * math.pi, rel=1e-4)
    assert rep.equality_class == "strict"
    assert rep.limit_ratio == pytest.approx(SCHW_LIMIT_RATIO, abs=1e-6)
    assert not rep.violated


def test_reissner_nordstrom_horizon_is_strict(rn31_ctx):
    rep = verify_inequality(rn31_ctx.W, 0.0, rn31_ctx)
    assert rep.gap > 0
    assert rep.equality_class == "strict"


@pytest.mark.parametrize("r0", [0.0, 0.5, 2.0, 10.0, 100.0])
def test_schwarzschild_slices_satisfy_the_inequality(schwarzschild2_ctx, r0):
    rep = verify_inequality(schwarzschild2_ctx.W, r0, schwarzschild2_ctx)
    assert rep.gap > 0 and not rep.violated


def test_report_key_order(schwarzschild2_ctx):
    rep = verify_inequality(schwarzschild2_ctx.W, 0.0, schwarzschild2_ctx)
    assert list(rep.as_dict()) == ["lhs", "rhs", "gap", "relative_slack", "b0", "b1", "avr",
                                   "avr_error", "equality_class", "limit_ratio", "flags"]


def test_modified_schwarzschild_ratio(modified_ctx):
    rep = verify_inequality(modified_ctx.W, 0.0, modified_ctx)
    assert rep.limit_ratio == pytest.approx(SCHW_LIMIT_RATIO, abs=1e-4)
    assert rep.equality_class == "strict"
    assert modified_ctx.constants.b0 == pytest.approx(SCHW_B0, abs=1e-8)


def test_inadmissible_manifold_is_refused():
    warp = LogWarp(lambda r: np.asarray(r, dtype=float),
                   lambda r: np.ones_like(np.asarray(r, dtype=float)),
                   lambda r: np.zeros_like(np.asarray(r, dtype=float)))
    with pytest.raises(ConditionsFailed):
        prepare(WarpedProduct(FiberManifold.round_sphere(2), warp, "exp"))


# -- equality limits ----------------------------------------------------------------

def test_jacobi_warp_ratio_tends_to_one():
    W, lam = jacobi_product(1e-4)
    ratio, _ = equality_limit_ratio(W, 0.0, decay_constants(lam))
    assert abs(ratio - 1.0) <= 1e-4


def test_nearly_flat_jacobi_warp_is_equality_w2():
    W, _ = jacobi_product(1e-6)
    rep = verify_inequality(W, 0.0)
    assert rep.equality_class == "equality-W2"


def test_affine_ratio_needs_the_exact_line(unit_cone):
    c = DecayConstants(0.0, 0.0)
    ratio, _ = equality_limit_ratio(unit_cone, 0.0, c)
    assert ratio == pytest.approx(1.0, abs=1e-12)
    half = builtin("cone", slope=0.5, offset=2.0)
    assert equality_limit_ratio(half, 0.0, c)[0] == pytest.approx(1.0, abs=1e-12)
    assert equality_limit_ratio(half, 1.0, c)[0] == pytest.approx(1.0, abs=1e-12)


def test_horizon_with_no_mean_curvature_and_no_curvature_has_no_ratio(schwarzschild2):
    assert equality_limit_ratio(schwarzschild2, 0.0, DecayConstants(0.0, 0.0)) is None


def test_w1_shape_checks(unit_cone, half_cone, schwarzschild2):
    assert equality_w1_check(unit_cone, 0.0, 1.0).passed
    w = equality_w1_check(half_cone, 0.0, 0.25)
    assert w.passed and w.r0_star == pytest.approx(2.0, rel=1e-12)
    assert not equality_w1_check(schwarzschild2, 0.0, 1.0).passed


# -- corollaries ----------------------------------------------------------------------

def test_minimal_area_bound(schwarzschild2_ctx):
    ctx = schwarzschild2_ctx
    bound = minimal_area_bound(ctx.W, ctx.constants, ctx.avr)
    assert bound == pytest.approx(SCHW_MIN_AREA_BOUND, rel=1e-4)
    assert 4 * math.pi * 4 > bound


def test_minimal_area_bound_scales_with_mass(schwarzschild2_ctx):
    W1 = builtin("schwarzschild", mass=1.0)
    c1 = decay_constants(W1.envelope)
    b1 = minimal_area_bound(W1, c1, 1.0)
    b2 = minimal_area_bound(schwarzschild2_ctx.W, schwarzschild2_ctx.constants, 1.0)
    assert b1 / b2 == pytest.approx(0.25, rel=1e-8)


def test_minimal_area_bound_diverges_without_curvature(unit_cone):
    with pytest.warns(RuntimeWarning):
        assert minimal_area_bound(unit_cone, DecayConstants(0.0, 0.0), 1.0) == math.inf
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        bounds = [minimal_area_bound(unit_cone, DecayConstants(0.0, b), 1.0) for b in (1e-1, 1e-3, 1e-6)]
    assert bounds[0] < bounds[1] < bounds[2]


@settings(max_examples=40, deadline=None)
@given(b0=st.floats(0.0, 3.0), b1=st.floats(1e-3, 3.0), avr=st.floats(1e-3, 2.0),
       area=st.floats(1e-2, 1e3))
def test_inequality_on_a_minimal_slice_implies_the_area_bound(schwarzschild2, b0, b1, avr, area):
    c = DecayConstants(b0, b1)
    lhs = math.exp(2 * b0) * area * b1 ** 2
    rhs = avr * 4 * math.pi
    bound = minimal_area_bound(schwarzschild2, c, avr)
    # lhs >= rhs and area >= bound are the same statement.
    assert (lhs - rhs) / (math.exp(2 * b0) * b1 ** 2) == pytest.approx(area - bound, abs=1e-10 * max(area, bound))


def test_photon_sphere_root(schwarzschild2_ctx):
    ctx = schwarzschild2_ctx
    root = slice_functional_root(ctx.W, ctx.constants, 0.5, 5.0)
    assert float(ctx.W.h(root)) == pytest.approx(3.0, abs=1e-4)
    assert root == pytest.approx(schwarzschild_coordinate(3.0, 2.0), abs=1e-6)


def test_cone_slice_functional_decreases(unit_cone):
    t = np.linspace(0.0, 50.0, 101)
    assert np.all(slice_functional_derivative(unit_cone, DecayConstants(0.0, 0.0), t) < 0)
    assert slice_functional_root(unit_cone, DecayConstants(0.0, 0.0), 0.0, 5.0) is None


@pytest.mark.parametrize("t", [0.3, 1.0, 3.0, 8.0, 40.0])
def test_slice_functional_derivative_matches_differences(schwarzschild2_ctx, t):
    W, c = schwarzschild2_ctx.W, schwarzschild2_ctx.constants
    eps = 1e-4 * max(1.0, t)
    fd = (slice_functional(W, c, t + eps) - slice_functional(W, c, t - eps)) / (2 * eps)
    assert slice_functional_derivative(W, c, t) == pytest.approx(fd, rel=1e-6, abs=1e-12)


# -- rigidity criteria ----------------------------------------------------------------

def test_constant_comparison(unit_cone):
    rep = rigidity_checks(unit_cone, 0.0, 1.0)
    assert rep.sphere_constant["sharp"] == pytest.approx(4 * math.pi)
    assert rep.sphere_constant["weaker"] == pytest.approx(math.pi)
    assert rep.sphere_constant["sharp_exceeds_weaker"]


def test_unit_ball_boundary_is_rigid(unit_cone):
    rep = rigidity_checks(unit_cone, 0.0, 1.0)
    assert rep.inradius["bound"] == pytest.approx(1.0)
    assert rep.inradius["equality"]
    assert rep.area["triggered"]
    assert rep.diameter["triggered"]


def test_half_cone_area_criterion_not_triggered(half_cone):
    rep = rigidity_checks(half_cone, 0.0, 0.25)
    assert rep.area["r0_star"] == pytest.approx(2.0, rel=1e-12)
    assert rep.area["bound"] == pytest.approx(16 * math.pi, rel=1e-12)
    assert not rep.area["triggered"]


def test_missing_diameter(unit_cone):
    W = unit_cone.with_fiber(FiberManifold(2, 5.0, 0.5))
    with pytest.raises(MissingFiberDiameter):
        rigidity_checks(W, 0.0, 1.0)
    assert rigidity_checks(W, 0.0, 1.0, require_diameter=False).diameter is None
