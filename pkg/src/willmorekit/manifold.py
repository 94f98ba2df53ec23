"""Warped-product ambients ``[0, inf) x N`` with ``g = dr^2 + h(r)^2 g_N``.

Warps come in four representations: closed-form families, profile-derived
warps obtained by inverting ``r = F(s)`` with ``F' = 1/sqrt(omega)``,
cubic-spline tabulations, and constant rescalings of another warp.  Every
warp also exposes ``log_terms`` (``h'/h``, ``h''/h``, ``log h``) so that
curvature quantities stay finite when ``h`` itself overflows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .associated import AssociatedFunction
from .avr import sphere_ball_constants
from .errors import (
    EnvelopeNotIntegrable,
    InvalidParameters,
    ProfileNegative,
)
from .numerics import TailHint, solve_first_order, solve_ivp

__all__ = [
    "FiberManifold",
    "WarpFunction",
    "AffineWarp",
    "LogWarp",
    "ProfileWarp",
    "ScaledWarp",
    "TabulatedWarp",
    "JacobiWarp",
    "ProbeSettings",
    "WarpedProduct",
    "ConditionFlags",
    "lambda_bounds",
    "radial_ricci",
    "envelope_lambda",
    "check_conditions",
    "check_warp_derivatives",
    "from_profile",
    "builtin",
    "schwarzschild",
    "reissner_nordstrom",
    "cone",
    "modified_schwarzschild",
    "BUILTIN_NAMES",
]

# b0 of the three-dimensional Schwarzschild envelope, used only to fix the
# mass of the rescaled experiment.
_SCHWARZSCHILD_B0 = (1.0 + math.log(4.0)) / 3.0


def _arr(r):
    return np.asarray(r, dtype=float)


def _out(x, like):
    return x if np.ndim(like) else float(x)


@dataclass(frozen=True)
class FiberManifold:
    """Closed fiber ``N`` entering only through ``(dim, |N|, rho)``.

    ``ricci_lower`` is the constant in ``Ric_N >= (dim - 1) rho g_N``.
    ``diameter`` is optional and only used by the rigidity checks.
    """

    dim: int
    area: float
    ricci_lower: float
    is_round_sphere: bool = False
    diameter: float | None = None

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 2:
            raise InvalidParameters("fiber dimension must be an integer >= 2")
        if not (self.area > 0 and math.isfinite(self.area)):
            raise InvalidParameters("fiber area must be positive and finite")
        if not math.isfinite(self.ricci_lower):
            raise InvalidParameters("ricci_lower must be finite")
        if self.diameter is not None and not self.diameter > 0:
            raise InvalidParameters("fiber diameter must be positive")
        if self.is_round_sphere:
            sphere_area = sphere_ball_constants(self.dim + 1)[0]
            if not math.isclose(self.area, sphere_area, rel_tol=1e-12) or self.ricci_lower != 1:
                raise InvalidParameters("round sphere fiber needs unit area and rho = 1")

    @classmethod
    def round_sphere(cls, dim: int = 2) -> "FiberManifold":
        return cls(dim, sphere_ball_constants(dim + 1)[0], 1.0, True, math.pi)

    def scaled_area(self, factor: float) -> "FiberManifold":
        """Same fiber data with ``|N|`` multiplied by ``factor`` (no longer round)."""
        return FiberManifold(self.dim, self.area * factor, self.ricci_lower, False,
                             self.diameter)


# -- warps ----------------------------------------------------------------------

class WarpFunction:
    """Positive warp ``h`` on ``[0, inf)`` with first and second derivatives.

    Subclasses implement ``value``, ``d1``, ``d2`` (vectorised).
    ``log_terms`` defaults to ratios of those.
    """

    representation = "closed-form"
    profile: tuple[Callable, Callable] | None = None
    scale = 1.0

    def value(self, r):
        raise NotImplementedError

    def d1(self, r):
        raise NotImplementedError

    def d2(self, r):
        raise NotImplementedError

    def log_terms(self, r):
        """Return ``(h'/h, h''/h, log h)``."""
        h = self.value(r)
        return self.d1(r) / h, self.d2(r) / h, np.log(h)

    def __call__(self, r):
        return self.value(r)


class AffineWarp(WarpFunction):
    """``h(r) = slope * r + offset``."""

    def __init__(self, slope: float, offset: float):
        if not offset > 0 or slope < 0:
            raise InvalidParameters("affine warp needs offset > 0 and slope >= 0")
        self.slope = float(slope)
        self.offset = float(offset)
        self.scale = max(1.0, self.offset)

    def value(self, r):
        return self.slope * _arr(r) + self.offset if np.ndim(r) else self.slope * r + self.offset

    def d1(self, r):
        return _out(np.full(np.shape(r), self.slope), r)

    def d2(self, r):
        return _out(np.zeros(np.shape(r)), r)


class LogWarp(WarpFunction):
    """``h = exp(phi(r))`` given ``phi``, ``phi'`` and ``phi''``."""

    def __init__(self, phi, dphi, d2phi, scale: float = 1.0):
        self.phi, self.dphi, self.d2phi = phi, dphi, d2phi
        self.scale = scale

    def value(self, r):
        with np.errstate(over="ignore"):
            return np.exp(self.phi(r))

    def d1(self, r):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.dphi(r) * self.value(r)

    def d2(self, r):
        with np.errstate(over="ignore", invalid="ignore"):
            return (self.d2phi(r) + self.dphi(r) ** 2) * self.value(r)

    def log_terms(self, r):
        a = self.dphi(r)
        return a, self.d2phi(r) + a * a, self.phi(r)


class ProfileWarp(WarpFunction):
    """Warp defined by ``h' = sqrt(omega(h))``, ``h(0) = s_low``.

    When ``omega(s_low) = 0`` the equation is degenerate at ``r = 0``.  It is
    integrated in the variable ``u = sqrt(h - s_low)``, for which
    ``u' = sqrt(q(s_low + u^2)) / 2`` with ``q(s) = omega(s)/(s - s_low)``.
    ``q`` is regular at the root; families pass it in closed form, otherwise
    a difference quotient blended into ``omega'(s_low)`` is used.

    Beyond ``r_max`` the warp continues affinely with the end slope.
    """

    representation = "profile-derived"

    def __init__(self, omega: Callable, domega: Callable, s_low: float,
                 quotient: Callable | None = None, r_max: float | None = None,
                 rel_tol: float = 1e-12, root_tol: float = 1e-12):
        if not s_low > 0:
            raise InvalidParameters("profile start s_low must be positive")
        self.omega, self.domega, self.s_low = omega, domega, float(s_low)
        self.profile = (omega, domega)
        self.scale = max(1.0, self.s_low)
        self.r_max = float(r_max) if r_max is not None else 1e13 * self.scale
        w0 = float(omega(self.s_low))
        if w0 < -root_tol:
            raise ProfileNegative(f"omega(s_low) = {w0:.3g} < 0")
        _probe_profile(omega, self.s_low)
        self.degenerate = abs(w0) <= root_tol
        if self.degenerate:
            if quotient is None:
                quotient = _blended_quotient(omega, domega, self.s_low)
            self.quotient = quotient
            s0 = self.s_low

            def rhs(r, u):
                return 0.5 * np.sqrt(np.maximum(quotient(s0 + u * u), 0.0))
            _, _, self._dense = solve_first_order(rhs, [0.0], self.r_max,
                                                  rel_tol=rel_tol, abs_tol=1e-14)
        else:
            self.quotient = None

            def rhs(r, h):
                return np.sqrt(np.maximum(omega(h), 0.0))
            _, _, self._dense = solve_first_order(rhs, [self.s_low], self.r_max,
                                                  rel_tol=rel_tol,
                                                  abs_tol=1e-14 * self.scale)
        self._h_end = float(self._raw(np.array([self.r_max]))[0])
        self._slope_end = float(self._d1_inside(np.array([self._h_end]),
                                                np.array([self.r_max]))[0])

    def _raw(self, r):
        y = self._dense(r)[0]
        return self.s_low + y * y if self.degenerate else y

    def _d1_inside(self, h, r):
        if self.degenerate:
            u = self._dense(r)[0]
            return np.abs(u) * np.sqrt(np.maximum(self.quotient(h), 0.0))
        return np.sqrt(np.maximum(self.omega(h), 0.0))

    def value(self, r):
        r_arr = np.atleast_1d(_arr(r))
        if np.any(r_arr < 0):
            raise ValueError("warp evaluated at negative r")
        inside = r_arr <= self.r_max
        out = np.empty_like(r_arr)
        out[inside] = self._raw(r_arr[inside]) if inside.any() else out[inside]
        out[~inside] = self._h_end + self._slope_end * (r_arr[~inside] - self.r_max)
        return out if np.ndim(r) else float(out[0])

    def d1(self, r):
        r_arr = np.atleast_1d(_arr(r))
        h = np.atleast_1d(self.value(r_arr))
        inside = r_arr <= self.r_max
        out = np.full_like(r_arr, self._slope_end)
        if inside.any():
            out[inside] = self._d1_inside(h[inside], r_arr[inside])
        return out if np.ndim(r) else float(out[0])

    def d2(self, r):
        r_arr = np.atleast_1d(_arr(r))
        h = np.atleast_1d(self.value(r_arr))
        out = 0.5 * np.asarray(self.domega(h), dtype=float)
        out = np.where(r_arr <= self.r_max, out, 0.0)
        return out if np.ndim(r) else float(out[0])

    def coordinate_radius(self, s: float) -> float:
        """``F(s)``: the ``r`` with ``h(r) = s``."""
        if s < self.s_low:
            raise ValueError("s below the profile start")
        if s == self.s_low:
            return 0.0
        if s >= self._h_end:
            return self.r_max + (s - self._h_end) / self._slope_end
        hi = max(1.0, s)
        while self.value(hi) < s:
            hi *= 2.0
        return brentq(lambda r: self.value(r) - s, 0.0, hi, xtol=1e-14 * hi,
                      rtol=4 * np.finfo(float).eps)


def _probe_profile(omega, s_low):
    s = s_low * (1.0 + np.concatenate([np.geomspace(1e-9, 1.0, 200),
                                       np.geomspace(1.0, 1e8, 400)[1:]]))
    vals = np.asarray(omega(s), dtype=float)
    if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
        k = int(np.argmin(np.where(np.isfinite(vals), vals, -np.inf)))
        raise ProfileNegative(f"omega({s[k]:.6g}) = {vals[k]:.3g} is not positive")


def _blended_quotient(omega, domega, s_low):
    delta = 1e-5 * max(1.0, s_low)
    slope0 = float(domega(s_low))
    at_delta = float(omega(s_low + delta)) / delta

    def q(s):
        e = np.asarray(s, dtype=float) - s_low
        safe = np.maximum(e, delta)
        far = np.asarray(omega(s_low + safe), dtype=float) / safe
        near = slope0 + (at_delta - slope0) * np.clip(e, 0.0, delta) / delta
        return np.where(e >= delta, far, near)
    return q


class ScaledWarp(WarpFunction):
    """``factor * base``; curvature ratios are those of ``base``."""

    def __init__(self, base: WarpFunction, factor: float):
        if not factor > 0:
            raise InvalidParameters("scale factor must be positive")
        self.base, self.factor = base, float(factor)
        self.representation = base.representation
        self.scale = max(1.0, factor * float(base.value(0.0)))

    def value(self, r):
        return self.factor * self.base.value(r)

    def d1(self, r):
        return self.factor * self.base.d1(r)

    def d2(self, r):
        return self.factor * self.base.d2(r)

    def log_terms(self, r):
        a, b, logh = self.base.log_terms(r)
        return a, b, logh + math.log(self.factor)


class TabulatedWarp(WarpFunction):
    """Cubic spline through ``(r_k, h_k)``, continued affinely past the last node."""

    representation = "tabulated-with-spline"

    def __init__(self, r, h):
        r, h = np.asarray(r, dtype=float), np.asarray(h, dtype=float)
        if r.ndim != 1 or r.size < 4 or r.size != h.size:
            raise InvalidParameters("need at least four (r, h) samples")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0):
            raise InvalidParameters("r samples must start at 0 and increase")
        if np.any(h <= 0):
            raise InvalidParameters("h samples must be positive")
        self._spline = CubicSpline(r, h)
        self.r_end = float(r[-1])
        self._h_end = float(h[-1])
        self._slope_end = float(self._spline(self.r_end, 1))
        self.scale = max(1.0, float(h[0]))

    def _piecewise(self, r, nu):
        r_arr = np.atleast_1d(_arr(r))
        inside = r_arr <= self.r_end
        out = np.empty_like(r_arr)
        out[inside] = self._spline(r_arr[inside], nu)
        beyond = r_arr[~inside] - self.r_end
        out[~inside] = (self._h_end + self._slope_end * beyond, np.full_like(beyond, self._slope_end),
                        np.zeros_like(beyond))[nu]
        return out if np.ndim(r) else float(out[0])

    def value(self, r):
        return self._piecewise(r, 0)

    def d1(self, r):
        return self._piecewise(r, 1)

    def d2(self, r):
        return self._piecewise(r, 2)


class JacobiWarp(WarpFunction):
    """Warp solving ``h'' = lam h``, ``h(0) = h0``, ``h'(0) = h0 * k``.

    ``lam`` must vanish beyond ``t_max``; past it the warp is affine.
    """

    representation = "closed-form"

    def __init__(self, lam, mean_ratio: float, t_max: float, h0: float = 1.0,
                 rel_tol: float = 1e-12):
        if not h0 > 0:
            raise InvalidParameters("h0 must be positive")
        kinks = tuple(lam.kinks) + ((lam.tail.support,) if lam.tail.support else ())
        self._lam = lam
        self._traj = solve_ivp(lambda t: float(lam(t)), 1.0, float(mean_ratio), t_max,
                               rel_tol=rel_tol, breakpoints=kinks)
        self.h0 = float(h0)
        self.t_max = float(t_max)
        self._end = (self._traj(self.t_max), self._traj.derivative(self.t_max))
        self.scale = max(1.0, self.h0)

    def _eval(self, r, nu):
        r_arr = np.atleast_1d(_arr(r))
        inside = r_arr <= self.t_max
        out = np.empty_like(r_arr)
        ri = r_arr[inside]
        if nu == 0:
            out[inside] = self._traj(ri)
            out[~inside] = self._end[0] + self._end[1] * (r_arr[~inside] - self.t_max)
        elif nu == 1:
            out[inside] = self._traj.derivative(ri)
            out[~inside] = self._end[1]
        else:
            out[inside] = np.asarray(self._lam(ri), dtype=float) * self._traj(ri)
            out[~inside] = 0.0
        out *= self.h0
        return out if np.ndim(r) else float(out[0])

    def value(self, r):
        return self._eval(r, 0)

    def d1(self, r):
        return self._eval(r, 1)

    def d2(self, r):
        return self._eval(r, 2)


# -- the ambient ------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeSettings:
    """Knobs for the "eventually" probes.

    ``r_probe`` is the probe horizon in units of the warp scale;
    ``per_decade`` the envelope grid density; ``trend_points`` the number of
    trailing geometric samples used by the monotonicity tests.
    """

    r_probe: float = 1e6
    per_decade: int = 512
    trend_points: int = 8
    growth_factor: float = 10.0
    inner_decades: float = 6.0

    def __post_init__(self):
        if not self.r_probe >= 100:
            raise InvalidParameters("r_probe must be at least 100")
        if self.per_decade < 8 or self.trend_points < 3:
            raise InvalidParameters("probe grid too coarse")


@dataclass(frozen=True, eq=False)
class WarpedProduct:
    """``M = [0, inf) x N`` with metric ``dr^2 + h(r)^2 g_N``.

    ``inner_fill_radius`` is the distance from ``r = 0`` to the point the
    inner boundary would collapse to if filled in (cone tips); ``None`` for
    horizons.
    """

    fiber: FiberManifold
    warp: WarpFunction
    name: str = "custom"
    params: Mapping[str, float] = field(default_factory=dict)
    probe: ProbeSettings = field(default_factory=ProbeSettings)
    inner_fill_radius: float | None = None

    def __post_init__(self):
        if self.n < 3:
            raise InvalidParameters("ambient dimension must be at least 3")
        h0 = float(self.warp.value(0.0))
        if not (h0 > 0 and math.isfinite(h0)):
            raise InvalidParameters("warp must be positive at r = 0")

    @property
    def n(self) -> int:
        return self.fiber.dim + 1

    @property
    def scale(self) -> float:
        return max(1.0, float(self.warp.value(0.0)))

    def h(self, r):
        return self.warp.value(r)

    @cached_property
    def envelope(self) -> AssociatedFunction:
        return envelope_lambda(self)

    @cached_property
    def conditions(self) -> "ConditionFlags":
        return check_conditions(self)

    def with_fiber(self, fiber: FiberManifold) -> "WarpedProduct":
        return WarpedProduct(fiber, self.warp, self.name, dict(self.params),
                             self.probe, self.inner_fill_radius)

    def describe(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({args}) n={self.n}"


def _bounds_arrays(W: WarpedProduct, r):
    a, b, logh = W.warp.log_terms(_arr(r))
    n = W.n
    rho = W.fiber.ricci_lower
    with np.errstate(over="ignore", under="ignore"):
        inv_h2 = np.exp(-2.0 * np.asarray(logh, dtype=float))
    lam1 = np.asarray(b, dtype=float)
    lam2 = lam1 / (n - 1) - (n - 2) / (n - 1) * (rho * inv_h2 - a * a)
    scale = np.abs(lam1) + abs(rho) * inv_h2 + a * a
    return lam1, lam2, scale


def lambda_bounds(W: WarpedProduct, r):
    """Return ``(lambda1, lambda2)`` at ``r`` (vectorised).

    ``lambda1 = h''/h`` and
    ``lambda2 = h''/((n-1) h) - (n-2)/(n-1) (rho - h'^2)/h^2``.
    """
    if np.any(_arr(r) < 0):
        raise ValueError("r must be nonnegative")
    lam1, lam2, _ = _bounds_arrays(W, r)
    if np.ndim(r):
        return lam1, lam2
    return float(lam1), float(lam2)


def radial_ricci(W: WarpedProduct, r):
    """``Ric(d_r, d_r)``, from the profile where one is available."""
    n = W.n
    if W.warp.profile is not None:
        h = W.warp.value(r)
        return -(n - 1) * W.warp.profile[1](h) / (2.0 * h)
    return -(n - 1) * W.warp.d2(r) / W.warp.value(r)


def _pointwise_bound(W: WarpedProduct, r):
    lam1, lam2, scale = _bounds_arrays(W, r)
    mu = np.maximum(np.maximum(lam1, lam2), 0.0)
    # Round-off level positives are not curvature.
    return np.where(mu <= 1e-12 * scale, 0.0, mu)


def _envelope_grid(W: WarpedProduct, probe: ProbeSettings):
    hi = probe.r_probe * W.scale
    lo = hi * 10.0 ** (-(math.log10(probe.r_probe) + probe.inner_decades))
    decades = math.log10(hi / lo)
    pts = np.geomspace(lo, hi, int(round(decades * probe.per_decade)) + 1)
    return np.concatenate([[0.0], pts])


def envelope_lambda(W: WarpedProduct, grid_spec: ProbeSettings | None = None
                    ) -> AssociatedFunction:
    """Monotone majorant of ``max(lambda1, lambda2, 0)``.

    On the log-spaced grid ``g_k`` the suffix maxima ``S_k`` are exact.
    Inside a cell ``[g_k, g_{k+1})`` the envelope is
    ``max(mu(r), S_{k+1})`` and beyond the grid ``min(mu(r), S_last)``,
    so it is continuous, dominates ``mu`` pointwise and coincides with
    ``mu`` wherever ``mu`` is already decreasing.
    """
    probe = grid_spec or W.probe
    grid = _envelope_grid(W, probe)
    with np.errstate(all="ignore"):
        mu = _pointwise_bound(W, grid)
    if not np.all(np.isfinite(mu)):
        bad = grid[~np.isfinite(mu)][0]
        raise EnvelopeNotIntegrable(f"curvature bound not finite at r={bad:.6g}")
    suffix = np.maximum.accumulate(mu[::-1])[::-1]

    if suffix[0] == 0.0:
        zero = AssociatedFunction.zero()
        return AssociatedFunction(zero.evaluator, zero.tail, "envelope-derived",
                                  (), True, (0.0, 0.0), f"envelope of {W.describe()}")

    zeros = np.nonzero(suffix == 0.0)[0]
    support = float(grid[zeros[0]]) if zeros.size else None
    exponent = None
    if support is None:
        k10 = int(np.searchsorted(grid, grid[-1] / 10.0))
        exponent = math.log10(suffix[k10] / suffix[-1]) / math.log10(grid[-1] / grid[k10])
        if not exponent > 2.02:
            raise EnvelopeNotIntegrable(
                f"envelope decay exponent {exponent:.3g} over the last decade before "
                f"r={grid[-1]:.3g} is not above 2; t*lambda is not integrable")

    last = float(suffix[-1])

    def evaluate(t):
        t_arr = np.atleast_1d(_arr(t))
        cell = np.searchsorted(grid, t_arr, side="right") - 1
        out = np.zeros_like(t_arr)
        inside = cell < grid.size - 1
        if support is not None:
            inside &= t_arr < support
        if inside.any():
            with np.errstate(all="ignore"):
                m = _pointwise_bound(W, t_arr[inside])
            out[inside] = np.maximum(m, suffix[cell[inside] + 1])
        beyond = cell >= grid.size - 1
        if support is None and beyond.any():
            with np.errstate(all="ignore"):
                m = _pointwise_bound(W, t_arr[beyond])
            out[beyond] = np.minimum(m, last)
        return out if np.ndim(t) else float(out[0])

    tail = TailHint(support=support, exponent=exponent, scale=W.scale)
    return AssociatedFunction(evaluate, tail, "envelope-derived", (), False, None,
                              f"envelope of {W.describe()}")


@dataclass(frozen=True)
class ConditionFlags:
    """Outcome of the four condition probes.

    ``witnesses`` holds the sample backing each flag and ``diagnostics``
    the reasons a probe came out false.
    """

    lambda1_positive_somewhere: bool
    envelope_admissible: bool
    h_over_r_eventually_nonincreasing: bool
    h_eventually_nondecreasing_and_unbounded: bool
    tau0: float | None
    witnesses: Mapping[str, object] = field(default_factory=dict)
    diagnostics: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {
            "lambda1_positive_somewhere": self.lambda1_positive_somewhere,
            "envelope_admissible": self.envelope_admissible,
            "h_over_r_eventually_nonincreasing": self.h_over_r_eventually_nonincreasing,
            "h_eventually_nondecreasing_and_unbounded":
                self.h_eventually_nondecreasing_and_unbounded,
            "tau0": self.tau0,
        }


def _trend(values, tol=1e-12):
    """True if ``values`` never rises by more than ``tol`` relative."""
    v = np.asarray(values, dtype=float)
    return bool(np.all(np.diff(v) <= tol * np.maximum(1.0, np.abs(v[1:]))))


def check_conditions(W: WarpedProduct) -> ConditionFlags:
    """Probe conditions (Lambda1)-(Lambda4) by sampling; never raises."""
    probe = W.probe
    witnesses: dict[str, object] = {}
    notes: list[str] = []
    grid = _envelope_grid(W, probe)

    with np.errstate(all="ignore"):
        lam1, lam2, scale = _bounds_arrays(W, grid)
    thr = 1e-12 * scale
    positive = np.isfinite(lam1) & ((lam1 > thr) | (lam2 > thr))
    lam_pos = bool(positive.any())
    if lam_pos:
        k = int(np.argmax(positive))
        witnesses["lambda_positive_at"] = (float(grid[k]), float(lam1[k]), float(lam2[k]))
    else:
        notes.append("max(lambda1, lambda2) <= 0 on the whole probe grid")

    try:
        env = W.envelope
        admissible = True
        witnesses["envelope_tail"] = (env.tail.support, env.tail.exponent)
    except EnvelopeNotIntegrable as exc:
        admissible = False
        notes.append(f"envelope: {exc}")

    geo = 2.0 ** np.arange(0, math.ceil(math.log2(probe.r_probe * W.scale)) + 1)
    with np.errstate(all="ignore"):
        a_geo, _, logh_geo = W.warp.log_terms(geo)
    log_ratio = np.asarray(logh_geo, dtype=float) - np.log(geo)
    tail = log_ratio[-probe.trend_points:]
    with np.errstate(over="ignore"):
        witnesses["h_over_r_tail"] = tuple(float(x) for x in np.exp(tail))
    if not np.all(np.isfinite(tail)):
        ratio_ok = False
        notes.append("h/r not finite on the probe grid")
    else:
        ratio_ok = _trend(tail)
        if not ratio_ok:
            notes.append(f"h/r still increasing near r={geo[-1]:.3g}")

    with np.errstate(all="ignore"):
        a_grid, _, logh_grid = W.warp.log_terms(grid)
    pts = np.concatenate([grid, geo])
    slopes = np.concatenate([np.asarray(a_grid, dtype=float), np.asarray(a_geo, dtype=float)])
    order = np.argsort(pts, kind="stable")
    pts, slopes = pts[order], slopes[order]
    bad = ~(slopes >= -1e-12)
    tau0 = None
    if not bad[-1]:
        tau0 = 0.0 if not bad.any() else float(pts[np.nonzero(bad)[0][-1] + 1])
    logh0 = float(np.asarray(W.warp.log_terms(0.0)[2]))
    grows = bool(np.isfinite(logh_geo[-1])) and (
        float(logh_geo[-1]) - logh0 > math.log(probe.growth_factor))
    rising = bool(np.all(np.diff(np.asarray(logh_geo[-probe.trend_points:])) > 0))
    unbounded = tau0 is not None and grows and rising
    witnesses["tau0"] = tau0
    witnesses["log_h_growth"] = float(logh_geo[-1]) - logh0
    if not unbounded:
        notes.append("h not eventually nondecreasing and unbounded on the probe range")

    return ConditionFlags(lam_pos, admissible, ratio_ok, unbounded, tau0,
                          witnesses, tuple(notes))


def check_warp_derivatives(warp: WarpFunction, grid, eps: float = 1e-5) -> float:
    """Worst relative mismatch between ``h'`` and a centred difference of ``h``."""
    r = np.asarray(grid, dtype=float)
    r = r[r > 2 * eps]
    fd = (warp.value(r + eps) - warp.value(r - eps)) / (2 * eps)
    d1 = warp.d1(r)
    return float(np.max(np.abs(fd - d1) / np.maximum(1.0, np.abs(d1))))


# -- construction ------------------------------------------------------------------

def from_profile(omega: Callable, s_low: float, fiber: FiberManifold,
                 domega: Callable | None = None, quotient: Callable | None = None,
                 name: str = "profile", params: Mapping[str, float] | None = None,
                 probe: ProbeSettings | None = None) -> WarpedProduct:
    """Warped product whose warp inverts ``r = F(s)``, ``F' = 1/sqrt(omega)``, ``F(s_low) = 0``.

    ``domega`` defaults to a centred difference of ``omega``.
    """
    if domega is None:
        def domega(s, _w=omega):
            s = np.asarray(s, dtype=float)
            eps = 1e-6 * np.maximum(1.0, np.abs(s))
            return (np.asarray(_w(s + eps)) - np.asarray(_w(s - eps))) / (2 * eps)
    warp = ProfileWarp(omega, domega, s_low, quotient=quotient)
    return WarpedProduct(fiber, warp, name, dict(params or {}), probe or ProbeSettings())


def _horizon_sum(s, s_low, n):
    """``sum_k s^k s_low^(n-3-k)`` for ``k = 0..n-3``, i.e. ``(s^(n-2) - s_low^(n-2))/(s - s_low)``."""
    s = np.asarray(s, dtype=float)
    return sum(s ** k * s_low ** (n - 3 - k) for k in range(n - 2))


def schwarzschild(m: float, n: int = 3, probe: ProbeSettings | None = None) -> WarpedProduct:
    """Spatial Schwarzschild exterior, ``omega(s) = 1 - m s^(2-n)``."""
    _check_dim(n)
    if not m > 0:
        raise InvalidParameters("mass must be positive")
    s_low = m ** (1.0 / (n - 2))

    def omega(s):
        return 1.0 - m * np.asarray(s, dtype=float) ** (2 - n)

    def domega(s):
        return m * (n - 2) * np.asarray(s, dtype=float) ** (1 - n)

    def quotient(s):
        s = np.asarray(s, dtype=float)
        return _horizon_sum(s, s_low, n) / s ** (n - 2)

    warp = ProfileWarp(omega, domega, s_low, quotient=quotient)
    return WarpedProduct(FiberManifold.round_sphere(n - 1), warp, "schwarzschild",
                         {"mass": m, "dim": n}, probe or ProbeSettings())


def reissner_nordstrom(m: float, q: float, n: int = 3,
                       probe: ProbeSettings | None = None) -> WarpedProduct:
    """Spatial Reissner-Nordstrom exterior, ``omega = 1 - m s^(2-n) + q^2 s^(4-2n)``; needs ``m > 2q > 0``."""
    _check_dim(n)
    if not (q > 0 and m > 2 * q):
        raise InvalidParameters("Reissner-Nordstrom needs m > 2q > 0")
    disc = math.sqrt(m * m - 4 * q * q)
    x_plus = 0.5 * (m + disc)
    x_minus = q * q / x_plus
    s_low = x_plus ** (1.0 / (n - 2))

    def omega(s):
        x = np.asarray(s, dtype=float) ** (n - 2)
        return 1.0 - m / x + q * q / (x * x)

    def domega(s):
        s = np.asarray(s, dtype=float)
        return m * (n - 2) * s ** (1 - n) - q * q * (2 * n - 4) * s ** (3 - 2 * n)

    def quotient(s):
        s = np.asarray(s, dtype=float)
        x = s ** (n - 2)
        return (x - x_minus) / (x * x) * _horizon_sum(s, s_low, n)

    warp = ProfileWarp(omega, domega, s_low, quotient=quotient)
    return WarpedProduct(FiberManifold.round_sphere(n - 1), warp, "reissner-nordstrom",
                         {"mass": m, "charge": q, "dim": n}, probe or ProbeSettings())


def cone(slope: float = 1.0, offset: float = 1.0, fiber: FiberManifold | None = None,
         n: int = 3, probe: ProbeSettings | None = None) -> WarpedProduct:
    """Truncated cone ``h(r) = slope * r + offset``."""
    if fiber is None:
        _check_dim(n)
        fiber = FiberManifold.round_sphere(n - 1)
    if not slope > 0:
        raise InvalidParameters("cone slope must be positive")
    warp = AffineWarp(slope, offset)
    return WarpedProduct(fiber, warp, "cone", {"slope": slope, "offset": offset},
                         probe or ProbeSettings(), inner_fill_radius=offset / slope)


def modified_schwarzschild(kappa: float = 1.0, probe: ProbeSettings | None = None
                           ) -> WarpedProduct:
    """Schwarzschild warp normalised to ``h(0) = 1``, mass ``2 e^b0 / (3 kappa)``.

    Only defined for ``n = 3``; the radial direction carries the smallest
    Ricci curvature when the mass is at least 1.
    """
    if not kappa > 0:
        raise InvalidParameters("kappa must be positive")
    m = 2.0 * math.exp(_SCHWARZSCHILD_B0) / (3.0 * kappa)
    base = schwarzschild(m, 3)
    warp = ScaledWarp(base.warp, 1.0 / m)
    return WarpedProduct(FiberManifold.round_sphere(2), warp, "modified-schwarzschild",
                         {"kappa": kappa, "mass": m, "dim": 3}, probe or ProbeSettings())


def _check_dim(n):
    if int(n) != n or n < 3:
        raise InvalidParameters("ambient dimension must be an integer >= 3")


BUILTIN_NAMES = ("schwarzschild", "reissner-nordstrom", "cone", "modified-schwarzschild")


def builtin(name: str, **params) -> WarpedProduct:
    """Look up a builtin family by name.

    ``schwarzschild(mass, dim)``, ``reissner-nordstrom(mass, charge, dim)``,
    ``cone(slope, offset, dim)`` and ``modified-schwarzschild(kappa)``.
    """
    key = name.replace("_", "-").lower()
    p = {k: v for k, v in params.items() if v is not None}
    if key == "schwarzschild":
        return schwarzschild(p.get("mass", 2.0), int(p.get("dim", 3)))
    if key == "reissner-nordstrom":
        return reissner_nordstrom(p.get("mass", 3.0), p.get("charge", 1.0), int(p.get("dim", 3)))
    if key == "cone":
        return cone(p.get("slope", 1.0), p.get("offset", 1.0), n=int(p.get("dim", 3)))
    if key == "modified-schwarzschild":
        return modified_schwarzschild(p.get("kappa", 1.0))
    raise InvalidParameters(f"unknown builtin manifold {name!r}")
