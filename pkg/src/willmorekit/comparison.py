"""Scalar Jacobi comparison along outward normal rays.

For an associated function ``lambda`` and a mean-curvature ratio ``k``
(``H/(n-1)``) the comparison solution solves ``y'' = lambda y``,
``y(0) = 1``, ``y'(0) = |k|``.  It is squeezed between the line
``j(t) = 1 + |k| t`` and the envelope line ``X(t) = e^b0 f t + 1`` with
``f = |k|(1 + b0) + b1``; the checks in this module verify that sandwich
and the monotonicity statements built on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .associated import AssociatedFunction
from .errors import InequalityViolated, MonotonicityViolated
from .numerics import (
    DEFAULT_REL_TOL,
    SolutionTrajectory,
    central_derivative,
    integrate,
    solve_first_order,
    solve_ivp,
)

__all__ = [
    "AssociatedFunction",
    "DecayConstants",
    "ComparisonInput",
    "ComparisonSolution",
    "ElementaryReport",
    "RatioReport",
    "RiccatiReport",
    "DecayPattern",
    "decay_constants",
    "make_input",
    "slice_input",
    "solve_comparison",
    "check_elementary_inequalities",
    "log_inequality_margins",
    "ratio_initial_slope",
    "slice_jacobian",
    "monotone_ratio_check",
    "riccati_residual",
    "decay_classification",
    "default_grid",
    "CUT_TIME",
    "FOCAL_TIME",
]

# Outward rays of slices in a warped product meet neither cut nor focal points.
CUT_TIME = math.inf
FOCAL_TIME = math.inf

RATIO_ZERO_SLOPE = 1e-8


@dataclass(frozen=True)
class DecayConstants:
    """``b0 = int t lambda`` and ``b1 = int lambda`` with absolute error bounds."""

    b0: float
    b1: float
    b0_error: float = 0.0
    b1_error: float = 0.0

    def __post_init__(self):
        for name in ("b0", "b1", "b0_error", "b1_error"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and nonnegative, got {v!r}")

    @property
    def vanishing(self) -> bool:
        return self.b0 == 0.0 and self.b1 == 0.0


def decay_constants(lam: AssociatedFunction, abs_tol: float = 1e-10) -> DecayConstants:
    """Integrate ``lambda`` and ``t lambda`` over ``[0, inf)``."""
    if lam.is_zero:
        return DecayConstants(0.0, 0.0)
    tail = lam.tail
    pts = tuple(lam.kinks)

    def f1(t):
        return float(lam(t))

    def f0(t):
        return t * float(lam(t))

    one = integrate(f1, 0.0, math.inf, abs_tol=abs_tol, tail_hint=tail, points=pts)
    zero_hint = tail
    if tail.exponent is not None:
        zero_hint = type(tail)(support=tail.support, exponent=tail.exponent - 1.0,
                               scale=tail.scale)
    zero = integrate(f0, 0.0, math.inf, abs_tol=abs_tol, tail_hint=zero_hint, points=pts)
    # Tiny negative round-off on vanishing integrals is clamped.
    b0, b1 = max(zero.value, 0.0), max(one.value, 0.0)
    if b0 == 0.0 or b1 == 0.0:
        b0 = b1 = 0.0
    return DecayConstants(b0, b1, zero.abs_error_estimate, one.abs_error_estimate)


@dataclass(frozen=True, eq=False)
class ComparisonInput:
    """Data of one comparison problem.

    ``lam`` is the coefficient along the ray; ``constants`` are the decay
    constants entering ``combined_rate`` and ``upper_line``.  They normally belong to the same
    function, but for slices away from the inner boundary the ray sees a
    shifted ``lambda`` while ``b0, b1`` stay those of the unshifted one.
    """

    mean_ratio: float
    constants: DecayConstants
    lam: AssociatedFunction
    n: int

    def __post_init__(self):
        if self.n < 3:
            raise ValueError("ambient dimension must be at least 3")

    @property
    def abs_mean_ratio(self) -> float:
        return abs(self.mean_ratio)

    @property
    def combined_rate(self) -> float:
        c = self.constants
        return self.abs_mean_ratio * (1.0 + c.b0) + c.b1

    @property
    def envelope_slope(self) -> float:
        """``e^b0 * combined_rate``, the slope of ``upper_line``."""
        return math.exp(self.constants.b0) * self.combined_rate


def make_input(lam: AssociatedFunction, mean_ratio: float, n: int,
               constants: DecayConstants | None = None) -> ComparisonInput:
    return ComparisonInput(float(mean_ratio), constants or decay_constants(lam), lam, int(n))


def slice_input(W, r0: float, constants: DecayConstants | None = None,
                shift: bool = True, lam: AssociatedFunction | None = None
                ) -> ComparisonInput:
    """Comparison input for the slice ``{r0} x N`` of a warped product.

    The ray coefficient is ``lambda(r0 + t)`` (``shift=True``) or the
    unshifted ``lambda(t)``; the constants are always those of the
    unshifted function.
    """
    base = lam if lam is not None else W.envelope
    if constants is None:
        constants = decay_constants(base)
    ray = base.shifted(r0) if shift else base
    a = float(np.asarray(W.warp.log_terms(float(r0))[0]))
    return ComparisonInput(a, constants, ray, W.n)


@dataclass(frozen=True, eq=False)
class ComparisonSolution:
    """``y`` with its lower and upper lines and the ratio ``y / upper_line``."""

    y: SolutionTrajectory
    inp: ComparisonInput

    @property
    def t_max(self) -> float:
        return self.y.t_max

    def lower_line(self, t):
        return 1.0 + self.inp.abs_mean_ratio * np.asarray(t, dtype=float)

    def upper_line(self, t):
        return self.inp.envelope_slope * np.asarray(t, dtype=float) + 1.0

    def ratio(self, t):
        """``y(t) / upper_line(t)``."""
        return self.y(t) / self.upper_line(t)

    def ratio_power(self, t):
        """``(y / upper_line)^(n-1)``, the ratio on the volume scale."""
        return self.ratio(t) ** (self.inp.n - 1)

    def numerator(self, t):
        """``y' U - U' y`` with ``U = upper_line``; the derivative of ``ratio`` times ``U^2``."""
        t = np.asarray(t, dtype=float)
        return self.y.derivative(t) * self.upper_line(t) - self.inp.envelope_slope * self.y(t)


def solve_comparison(inp: ComparisonInput, t_max: float,
                     rel_tol: float = DEFAULT_REL_TOL) -> ComparisonSolution:
    """Solve ``y'' = lambda y``, ``y(0) = 1``, ``y'(0) = |k|`` on ``[0, t_max]``."""
    lam = inp.lam
    kinks = tuple(lam.kinks)
    if lam.tail.support is not None:
        kinks += (lam.tail.support,)
    traj = solve_ivp(lambda t: float(lam(t)), 1.0, inp.abs_mean_ratio, t_max,
                     rel_tol=rel_tol, breakpoints=kinks)
    return ComparisonSolution(traj, inp)


def default_grid(t_max: float, count: int = 400) -> np.ndarray:
    """Uniform plus log-spaced points on ``[0, t_max]``."""
    lin = np.linspace(0.0, t_max, count // 2)
    geo = np.geomspace(min(1e-3, t_max / 10), t_max, count // 2)
    return np.unique(np.concatenate([lin, geo]))


def ratio_initial_slope(inp: ComparisonInput) -> float:
    """``|k| - e^b0 f``: the right derivative of ``y/X`` at ``t = 0``."""
    return inp.abs_mean_ratio - inp.envelope_slope


@dataclass(frozen=True)
class ElementaryReport:
    """Worst scaled margin of each inequality and where it occurs.

    Margins are differences divided by ``max(1, |larger side|)``; each must
    be ``>= -tol``.
    """

    margins: dict
    where: dict
    tol: float

    @property
    def ok(self) -> bool:
        return all(v >= -self.tol for v in self.margins.values())

    @property
    def worst(self) -> tuple[str, float]:
        name = min(self.margins, key=self.margins.get)
        return name, self.margins[name]


def _worst(values, grid):
    k = int(np.argmin(values))
    return float(values[k]), float(grid[k])


def log_inequality_margins(inp: ComparisonInput, grid: Sequence[float],
                           rel_tol: float = 1e-11) -> np.ndarray:
    """Margin ``rhs - lhs`` of the integrated logarithmic inequality on ``grid``.

    ``lhs = log(|k| + int_0^t lambda y)`` and
    ``rhs = int_0^t s lambda + int_0^t lambda / (|k| + int_0^s lambda (|k| u + 1)) + log |k|``.
    All cumulative integrals ride along with ``y`` in one first-order system.
    Requires ``k != 0``.
    """
    k = inp.abs_mean_ratio
    if k == 0:
        raise ValueError("the logarithmic inequality needs a nonzero mean ratio")
    lam = inp.lam
    grid = np.asarray(grid, dtype=float)

    def rhs(t, s):
        y, _, _, _, C, _ = s
        L = float(lam(t))
        return [s[1], L * y, L * y, t * L, L * (k * t + 1.0), L / (k + C)]

    kinks = tuple(lam.kinks) + ((lam.tail.support,) if lam.tail.support else ())
    t_end = float(grid[-1])
    _, _, dense = solve_first_order(rhs, [1.0, k, 0.0, 0.0, 0.0, 0.0], t_end,
                                    rel_tol=rel_tol, abs_tol=rel_tol * 1e-2,
                                    breakpoints=kinks)
    st = dense(grid)
    lhs = np.log(k + st[2])
    right = st[3] + st[5] + math.log(k)
    return right - lhs


def check_elementary_inequalities(sol: ComparisonSolution, grid: Sequence[float] | None = None,
                                  tol: float = 1e-9, raise_on_failure: bool = True,
                                  include_log: bool = True) -> ElementaryReport:
    """Evaluate the comparison inequalities on ``grid``.

    Checked: ``lower_line <= y <= upper_line``, ``y'`` capped by the
    upper slope, the sign of the initial slope of ``ratio``, monotonicity
    of ``numerator`` and, when ``k != 0``, the logarithmic inequality.
    """
    grid = default_grid(sol.t_max) if grid is None else np.asarray(grid, dtype=float)
    grid = grid[(grid >= 0) & (grid <= sol.t_max)]
    inp = sol.inp
    y = sol.y(grid)
    dy = sol.y.derivative(grid)
    lower = sol.lower_line(grid)
    upper = sol.upper_line(grid)
    cap = inp.envelope_slope

    margins, where = {}, {}
    margins["y_minus_lower"], where["y_minus_lower"] = _worst((y - lower) / np.maximum(1.0, y), grid)
    margins["upper_minus_y"], where["upper_minus_y"] = _worst((upper - y) / np.maximum(1.0, upper), grid)
    margins["slope_cap"], where["slope_cap"] = _worst((cap - dy) / max(1.0, cap), grid)
    margins["ratio_initial_slope"] = -ratio_initial_slope(inp) / max(1.0, cap)
    where["ratio_initial_slope"] = 0.0

    num = sol.numerator(grid)
    scale = np.maximum(1.0, np.abs(dy) * upper + cap * np.abs(y))
    rise = np.diff(num) / scale[1:]
    if rise.size:
        margins["numerator_monotone"], where["numerator_monotone"] = _worst(rise, grid[1:])
    else:
        margins["numerator_monotone"], where["numerator_monotone"] = 0.0, 0.0

    if include_log and inp.abs_mean_ratio > 0:
        logm = log_inequality_margins(inp, grid)
        margins["log_inequality"], where["log_inequality"] = _worst(logm, grid)

    report = ElementaryReport(margins, where, tol)
    if raise_on_failure and not report.ok:
        name, m = report.worst
        raise InequalityViolated(f"{name} violated with margin {m:.3g} at t={where[name]:.6g}",
                                 where=where[name], margin=m)
    return report


def slice_jacobian(W, r0: float, t):
    """``h(r0 + t)/h(r0)``: the per-direction Jacobian of the outward normal flow."""
    t = np.asarray(t, dtype=float)
    out = W.warp.value(r0 + t) / W.warp.value(float(r0))
    return out if np.ndim(t) else float(out)


@dataclass(frozen=True)
class RatioReport:
    ratios: np.ndarray = field(repr=False)
    max_rise: float
    upper_ratio_excess: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_rise <= self.tol and self.upper_ratio_excess <= self.tol


def monotone_ratio_check(W, r0: float, sol: ComparisonSolution,
                         grid: Sequence[float] | None = None, tol: float = 1e-9,
                         raise_on_failure: bool = True) -> RatioReport:
    """Check that ``J/y`` is nonincreasing and bounds ``(J/X)^(n-1)`` from above.

    The second check is ``sup_{t >= R'} (J/X)^(n-1) <= (J(R')/y(R'))^(n-1)``
    for every ``R'`` on the grid.
    """
    grid = default_grid(sol.t_max) if grid is None else np.asarray(grid, dtype=float)
    grid = grid[(grid >= 0) & (grid <= sol.t_max)]
    J = slice_jacobian(W, r0, grid)
    y = sol.y(grid)
    ratio = J / y
    rises = np.diff(ratio) / np.maximum(1.0, np.abs(ratio[1:]))
    max_rise = float(rises.max()) if rises.size else 0.0

    p = sol.inp.n - 1
    hat = (J / sol.upper_line(grid)) ** p
    tail_sup = np.maximum.accumulate(hat[::-1])[::-1]
    excess = float(np.max(tail_sup - ratio ** p))
    report = RatioReport(ratio, max_rise, excess, tol)
    if raise_on_failure and not report.ok:
        raise MonotonicityViolated(
            f"J/y rises by {max_rise:.3g}; upper ratio excess {excess:.3g}",
            margin=-max(max_rise, excess))
    return report


@dataclass(frozen=True)
class RiccatiReport:
    max_residual: float
    max_envelope_excess: float


def riccati_residual(W, r0: float, grid: Sequence[float] | None = None,
                     envelope: AssociatedFunction | None = None) -> RiccatiReport:
    """Residual of ``u' + u^2 = h''/h`` for ``u(t) = h'/h (r0 + t)``.

    ``u'`` comes from a five-point stencil with step ``1e-3 max(1, t)``.
    Also reports the largest excess of ``u'`` over ``lambda(r0 + t) - u^2``
    for the envelope ``lambda``.
    """
    grid = np.linspace(0.0, 20.0, 201) if grid is None else np.asarray(grid, dtype=float)

    def u(t):
        return np.asarray(W.warp.log_terms(r0 + np.asarray(t, dtype=float))[0], dtype=float)

    step = 1e-3 * np.maximum(1.0, grid)
    du = central_derivative(u, grid, step)
    a, b, _ = W.warp.log_terms(r0 + grid)
    a = np.asarray(a, dtype=float)
    residual = float(np.max(np.abs(du + a * a - np.asarray(b, dtype=float))))
    env = W.envelope if envelope is None else envelope
    excess = float(np.max(du + a * a - np.asarray(env(r0 + grid), dtype=float)))
    return RiccatiReport(residual, excess)


@dataclass(frozen=True)
class DecayPattern:
    """Sign pattern of the derivative of ``ComparisonSolution.ratio``.

    ``label`` is one of ``"D1-compact-support"``, ``"D2-slope-to-zero"``,
    ``"decreasing-everywhere"`` or ``"indeterminate"``; ``tau`` is the
    start of the flat tail (D1) or of the increasing tail (D2).
    """

    label: str
    tau: float | None
    slopes: np.ndarray = field(repr=False)
    grid: np.ndarray = field(repr=False)


def decay_classification(sol: ComparisonSolution, horizon: float,
                         grid: Sequence[float] | None = None,
                         zero_tol: float = RATIO_ZERO_SLOPE) -> DecayPattern:
    """Classify the sampled derivative of ``sol.ratio`` on ``[0, horizon]``.

    The derivative is a centred difference with step ``1e-4 max(1, t)`` on the
    dense solution (one-sided at ``t = 0``).  A constant ratio is
    classified D1 with ``tau = 0``.
    """
    if horizon > sol.t_max:
        raise ValueError("solution does not reach the classification horizon")
    if grid is None:
        grid = np.unique(np.concatenate([np.linspace(0.0, horizon, 400),
                                         np.geomspace(1e-3, horizon, 400)]))
    grid = np.asarray(grid, dtype=float)
    step = 1e-4 * np.maximum(1.0, grid)
    inner = grid + 4 * step <= sol.t_max
    inner &= grid <= horizon - 2 * step[-1]
    inner[0] = True
    grid = grid[inner]
    step = step[inner]
    slopes = central_derivative(sol.ratio, grid, step)
    zero = np.abs(slopes) < zero_tol

    if zero.all():
        return DecayPattern("D1-compact-support", 0.0, slopes, grid)
    # Start of the trailing run of zero slopes.
    nonzero_idx = np.nonzero(~zero)[0]
    last_nonzero = nonzero_idx[-1]
    if last_nonzero < grid.size - 1 and grid[-1] - grid[last_nonzero + 1] >= 0.1 * horizon:
        tau = float(grid[last_nonzero + 1])
        return DecayPattern("D1-compact-support", tau, slopes, grid)
    if np.all(slopes[~zero] < 0) and zero.sum() <= 1:
        return DecayPattern("decreasing-everywhere", None, slopes, grid)
    negatives = np.nonzero(slopes < -zero_tol)[0]
    if negatives.size and negatives[-1] < grid.size - 1:
        tail = slopes[negatives[-1] + 1:]
        tail_grid = grid[negatives[-1] + 1:]
        quarter = tail[tail_grid >= tail_grid[0] + 0.75 * (grid[-1] - tail_grid[0])]
        if (tail >= 0).all() and tail.size >= 4 and quarter.size >= 2 \
                and quarter[-1] <= quarter.max() and quarter[-1] < tail.max():
            return DecayPattern("D2-slope-to-zero", float(tail_grid[0]), slopes, grid)
    return DecayPattern("indeterminate", None, slopes, grid)
