"""The Willmore-type inequality on slices of warped products.

For a slice ``Sigma = {r0} x N`` every integrand is constant, so the left
side is ``e^((n-1) b0) |Sigma| f^(n-1)`` with ``f = |k|(1 + b0) + b1`` and
``k = h'(r0)/h(r0)``; the right side is ``AVR |S^(n-1)|``.  This module
assembles both sides, classifies equality, and evaluates the corollaries
built on them.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import bisect

from .associated import AssociatedFunction
from .avr import AvrEstimate, estimate_avr, sphere_ball_constants
from .comparison import DecayConstants, decay_constants
from .errors import (
    ConditionsFailed,
    EnvelopeNotIntegrable,
    MissingFiberDiameter,
    NumericalError,
)
from .manifold import ConditionFlags, WarpedProduct
from .numerics import extrapolate_limit

__all__ = [
    "SliceData",
    "AnalysisContext",
    "VerificationReport",
    "W1Check",
    "RigidityReport",
    "EQUALITY_TOL",
    "prepare",
    "slice_data",
    "willmore_lhs",
    "reduced_lhs",
    "verify_inequality",
    "equality_limit_ratio",
    "equality_w1_check",
    "minimal_area_bound",
    "slice_functional",
    "slice_functional_derivative",
    "slice_functional_root",
    "rigidity_checks",
]

EQUALITY_TOL = 1e-4
SOUNDNESS_TOL = 1e-6
_CLASSES = ("equality-W1", "equality-W2", "strict", "indeterminate")


@dataclass(frozen=True)
class SliceData:
    """Area and mean curvature of ``{r0} x N``."""

    r0: float
    area: float
    mean_curvature: float
    mean_ratio: float

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("slice area must be positive")


def slice_data(W: WarpedProduct, r0: float) -> SliceData:
    if r0 < 0:
        raise ValueError("r0 must be nonnegative")
    h = float(W.warp.value(float(r0)))
    k = float(np.asarray(W.warp.log_terms(float(r0))[0]))
    return SliceData(float(r0), W.fiber.area * h ** (W.n - 1), (W.n - 1) * k, k)


@dataclass(frozen=True, eq=False)
class AnalysisContext:
    """Slice-independent data of one ambient, computed once per manifold."""

    W: WarpedProduct
    flags: ConditionFlags
    lam: AssociatedFunction
    constants: DecayConstants
    avr: AvrEstimate
    sphere_area: float

    @property
    def flat_regime(self) -> bool:
        """True when the associated function vanishes (reduced inequality)."""
        return self.lam.is_zero or self.constants.vanishing


def prepare(W: WarpedProduct, abs_tol: float = 1e-10) -> AnalysisContext:
    """Condition flags, envelope, decay constants and AVR for ``W``.

    Raises :class:`ConditionsFailed` when no admissible envelope exists.
    """
    flags = W.conditions
    if not flags.envelope_admissible:
        raise ConditionsFailed("; ".join(flags.diagnostics) or "envelope not admissible")
    try:
        lam = W.envelope if flags.lambda1_positive_somewhere else AssociatedFunction.zero()
    except EnvelopeNotIntegrable as exc:
        raise ConditionsFailed(str(exc)) from exc
    constants = decay_constants(lam, abs_tol=abs_tol)
    avr = estimate_avr(W)
    return AnalysisContext(W, flags, lam, constants, avr, sphere_ball_constants(W.n)[0])


def willmore_lhs(W: WarpedProduct, slc: SliceData, c: DecayConstants) -> float:
    """``e^((n-1) b0) |Sigma| (|k|(1 + b0) + b1)^(n-1)``."""
    p = W.n - 1
    f = abs(slc.mean_ratio) * (1.0 + c.b0) + c.b1
    return math.exp(p * c.b0) * slc.area * f ** p


def reduced_lhs(W: WarpedProduct, slc: SliceData) -> float:
    """``int |H/(n-1)|^(n-1)`` over the slice; the left side when ``lambda = 0``."""
    return slc.area * abs(slc.mean_curvature / (W.n - 1)) ** (W.n - 1)


def equality_limit_ratio(W: WarpedProduct, r0: float, c: DecayConstants,
                         horizon: float | None = None) -> tuple[float, float] | None:
    """Limit of ``rho(r0 + t) / (e^b0 f t)`` with ``rho(r) = h(r)/h(r0)``.

    Sampled at ``t = horizon * (1, 10, 100, 1000)`` (default horizon
    ``1e3`` times the warp scale) and extrapolated with ``log(t)/t``,
    ``1/t`` and ``log(t)/t^2`` corrections removed.  Returns
    ``(ratio, error)``, or ``None`` when ``f = 0``.
    """
    k = float(np.asarray(W.warp.log_terms(float(r0))[0]))
    f = abs(k) * (1.0 + c.b0) + c.b1
    if f == 0.0:
        return None
    slope = math.exp(c.b0) * f
    h0 = float(W.warp.value(float(r0)))
    base = horizon if horizon is not None else 1e3 * W.scale
    ts = [base * 10.0 ** i for i in range(4)]
    samples = [(t, float(W.warp.value(r0 + t)) / (h0 * slope * t)) for t in ts]
    # Warps are accurate to about 1e-12 relative.
    noise = 1e-11 * max(abs(v) for _, v in samples)
    return extrapolate_limit(samples, "log-power", noise=noise)


@dataclass(frozen=True)
class W1Check:
    passed: bool
    r0_star: float
    max_deviation: float


def equality_w1_check(W: WarpedProduct, r0: float, avr: AvrEstimate | float,
                      grid: Sequence[float] | None = None, tol: float = 1e-6) -> W1Check:
    """Compare the warp with the truncated cone ``h(r0) (1 + t/r0*)``.

    ``r0* = (|Sigma| / (AVR |S^(n-1)|))^(1/(n-1))``; the deviation is
    relative to the cone value.
    """
    value = avr.value if isinstance(avr, AvrEstimate) else float(avr)
    slc = slice_data(W, r0)
    p = W.n - 1
    sphere = sphere_ball_constants(W.n)[0]
    if not value > 0:
        return W1Check(False, math.inf, math.inf)
    r_star = (slc.area / (value * sphere)) ** (1.0 / p)
    t = np.linspace(0.0, 1e3 * W.scale, 2001) if grid is None else np.asarray(grid, dtype=float)
    h0 = float(W.warp.value(float(r0)))
    model = h0 * (1.0 + t / r_star)
    dev = float(np.max(np.abs(W.warp.value(r0 + t) - model) / model))
    return W1Check(dev <= tol, r_star, dev)


def minimal_area_bound(W: WarpedProduct, c: DecayConstants, avr: AvrEstimate | float) -> float:
    """Lower bound ``AVR |S^(n-1)| / (e^b0 b1)^(n-1)`` for closed minimal slices.

    Returns ``inf`` with a warning when ``b1 = 0``: the bound is vacuous.
    """
    value = avr.value if isinstance(avr, AvrEstimate) else float(avr)
    sphere = sphere_ball_constants(W.n)[0]
    if c.b1 == 0.0:
        warnings.warn("b1 = 0: the minimal-area bound is infinite (no closed minimal slice)",
                      RuntimeWarning, stacklevel=2)
        return math.inf
    return value * sphere / (math.exp(c.b0) * c.b1) ** (W.n - 1)


def slice_functional(W: WarpedProduct, c: DecayConstants, t):
    """``|N| (|h'/h|(1 + b0) + b1)^(n-1)`` at the slice ``r = t``."""
    a = np.asarray(W.warp.log_terms(np.asarray(t, dtype=float))[0], dtype=float)
    out = W.fiber.area * (np.abs(a) * (1.0 + c.b0) + c.b1) ** (W.n - 1)
    return out if np.ndim(t) else float(out)


def slice_functional_derivative(W: WarpedProduct, c: DecayConstants, t):
    """Derivative of :func:`slice_functional` where ``h' >= 0``.

    ``(n-1)|N|(1 + b0)(h'/h (1 + b0) + b1)^(n-2) (h''/h - (h'/h)^2)``.
    """
    a, b, _ = W.warp.log_terms(np.asarray(t, dtype=float))
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    n = W.n
    out = ((n - 1) * W.fiber.area * (1.0 + c.b0) * (a * (1.0 + c.b0) + c.b1) ** (n - 2)
           * (b - a * a))
    return out if np.ndim(t) else float(out)


def slice_functional_root(W: WarpedProduct, c: DecayConstants, lo: float, hi: float,
                        xtol: float = 1e-12) -> float | None:
    """Bisect a sign change of ``F'`` on ``[lo, hi]``; ``None`` if the signs agree."""
    a, b = slice_functional_derivative(W, c, lo), slice_functional_derivative(W, c, hi)
    if a == 0.0:
        return float(lo)
    if b == 0.0:
        return float(hi)
    if (a > 0) == (b > 0):
        return None
    return float(bisect(lambda r: slice_functional_derivative(W, c, r), lo, hi, xtol=xtol))


@dataclass(frozen=True)
class VerificationReport:
    """Both sides of the inequality on one slice and how they compare.

    ``tolerance_budget`` is the propagated numerical uncertainty of ``gap``.
    """

    lhs: float
    rhs: float
    gap: float
    relative_slack: float
    constants: DecayConstants
    avr: AvrEstimate
    flags: ConditionFlags
    equality_class: str
    limit_ratio: float | None
    slice: SliceData
    tolerance_budget: float
    r0_star: float | None = None
    limit_ratio_error: float | None = None
    diagnostics: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.equality_class not in _CLASSES:
            raise ValueError(f"unknown equality class {self.equality_class!r}")

    @property
    def violated(self) -> bool:
        return self.gap < -self.tolerance_budget

    def as_dict(self) -> dict:
        """Fields of the machine-readable report, in their fixed order."""
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "gap": self.gap,
            "relative_slack": self.relative_slack,
            "b0": self.constants.b0,
            "b1": self.constants.b1,
            "avr": self.avr.value,
            "avr_error": self.avr.error_estimate,
            "equality_class": self.equality_class,
            "limit_ratio": self.limit_ratio,
            "flags": self.flags.as_dict(),
        }


def _budget(W, slc, ctx, lhs):
    p = W.n - 1
    c = ctx.constants
    f = abs(slc.mean_ratio) * (1.0 + c.b0) + c.b1
    rel = p * c.b0_error
    if f > 0:
        rel += p * (abs(slc.mean_ratio) * c.b0_error + c.b1_error) / f
    return max(SOUNDNESS_TOL * ctx.sphere_area * ctx.avr.value,
               lhs * rel + ctx.sphere_area * ctx.avr.error_estimate)


def _limit_ratio(W, r0, c, notes):
    try:
        return equality_limit_ratio(W, r0, c)
    except NumericalError as exc:
        # The ratio only decides equality; a failed limit leaves the slice
        # strict or indeterminate.
        notes.append(f"limit ratio unavailable: {type(exc).__name__}: {exc}")
        return None


def verify_inequality(W: WarpedProduct, r0: float,
                      context: AnalysisContext | None = None) -> VerificationReport:
    """Evaluate the inequality on the slice ``{r0} x N`` and classify equality.

    Equality needs ``|gap| <= 1e-4 rhs`` together with the cone-shape test
    (vanishing ``lambda``) or ``|limit ratio - 1| <= 1e-4`` (otherwise);
    ``gap > 1e-4 rhs`` is strict; anything else is indeterminate.
    """
    ctx = context or prepare(W)
    slc = slice_data(W, r0)
    c = ctx.constants
    rhs = ctx.avr.value * ctx.sphere_area
    notes: list[str] = []
    if ctx.flat_regime:
        lhs = reduced_lhs(W, slc)
    else:
        lhs = willmore_lhs(W, slc, c)
    gap = lhs - rhs
    slack = gap / rhs if rhs > 0 else math.inf
    budget = _budget(W, slc, ctx, lhs)

    ratio = ratio_err = r_star = None
    shape_ok = False
    if ctx.flat_regime:
        w1 = equality_w1_check(W, r0, ctx.avr)
        r_star, shape_ok = w1.r0_star, w1.passed
        if not shape_ok:
            notes.append(f"cone shape deviates by {w1.max_deviation:.3g}")
        lim = _limit_ratio(W, r0, c, notes)
        if lim is not None:
            ratio, ratio_err = lim
    else:
        lim = _limit_ratio(W, r0, c, notes)
        if lim is not None:
            ratio, ratio_err = lim
            shape_ok = abs(ratio - 1.0) <= EQUALITY_TOL

    threshold = EQUALITY_TOL * rhs
    if gap > threshold:
        cls = "strict"
    elif abs(gap) <= threshold and shape_ok:
        cls = "equality-W1" if ctx.flat_regime else "equality-W2"
    else:
        cls = "indeterminate"
    if gap < -budget:
        notes.append(f"inequality violated: gap {gap:.6g} below -{budget:.3g}")
    return VerificationReport(lhs, rhs, gap, slack, c, ctx.avr, ctx.flags, cls, ratio, slc,
                              budget, r_star, ratio_err, tuple(notes) + ctx.flags.diagnostics)


@dataclass(frozen=True)
class RigidityReport:
    """Rigidity criteria and the constant comparison on one slice.

    Each entry maps a criterion name to a dict with its numbers and flags.
    """

    sphere_constant: dict
    diameter: dict | None
    area: dict
    inradius: dict | None

    def as_dict(self) -> dict:
        return {"sphere_constant": self.sphere_constant, "diameter": self.diameter,
                "area": self.area, "inradius": self.inradius}


def rigidity_checks(W: WarpedProduct, r0: float, avr: AvrEstimate | float,
                 require_diameter: bool = True) -> RigidityReport:
    """Evaluate the Euclidean rigidity criteria and the weaker-constant comparison.

    * sharp constant ``|S^(n-1)|`` against ``|S^(n-2)|/(n-1)``;
    * ``diam(Sigma) = h(r0) diam(N) >= pi r0*``;
    * ``|Sigma| >= r0*^(n-1) |S^(n-1)|``;
    * inward distance ``r0 + fill radius`` against ``1/k`` for ``k > 0``.

    Raises :class:`MissingFiberDiameter` for a non-spherical fiber without
    a diameter unless ``require_diameter`` is false.
    """
    value = avr.value if isinstance(avr, AvrEstimate) else float(avr)
    n = W.n
    sharp = sphere_ball_constants(n)[0]
    weak = sphere_ball_constants(n - 1)[0] / (n - 1)
    constant = {"sharp": sharp, "weaker": weak, "sharp_rhs": value * sharp,
                "weaker_rhs": value * weak, "sharp_exceeds_weaker": sharp > weak}

    slc = slice_data(W, r0)
    r_star = (slc.area / (value * sharp)) ** (1.0 / (n - 1)) if value > 0 else math.inf
    h0 = float(W.warp.value(float(r0)))
    rel = 1e-9

    diam = None
    if W.fiber.diameter is None:
        if require_diameter and not W.fiber.is_round_sphere:
            raise MissingFiberDiameter("fiber diameter needed for the diameter criterion")
    else:
        d = h0 * W.fiber.diameter
        diam = {"diameter": d, "bound": math.pi * r_star,
                "triggered": d >= math.pi * r_star * (1 - rel)}

    area_bound = r_star ** (n - 1) * sharp
    area = {"area": slc.area, "bound": area_bound, "r0_star": r_star,
            "triggered": slc.area >= area_bound * (1 - rel)}

    inrad = None
    k = slc.mean_ratio
    if k > 0:
        depth = r0 + (W.inner_fill_radius or 0.0)
        inrad = {"sup_distance": depth, "bound": 1.0 / k,
                 "holds": depth <= (1.0 / k) * (1 + rel),
                 "equality": math.isclose(depth, 1.0 / k, rel_tol=rel)}
    return RigidityReport(constant, diam, area, inrad)
