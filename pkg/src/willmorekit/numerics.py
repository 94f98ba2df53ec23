"""Numerical kernel: IVP integration, quadrature and limit extrapolation.

The Runge-Kutta work is delegated to SciPy's DOP853 pair (8th order with a
7th order dense output) and finite-interval quadrature to QUADPACK via
:func:`scipy.integrate.quad`.  What lives here is the plumbing around them:
reduction of ``y'' = lambda(t) y`` to a first-order system, finiteness
guards, semi-infinite tails by truncation-point doubling and Richardson
elimination on geometric sequences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate as _spi

from .errors import (
    AccuracyNotReached,
    InsufficientSamples,
    NonFiniteCoefficient,
    NonFiniteIntegrand,
    NonMonotoneTail,
    NumericalError,
    StepUnderflow,
    TailNotConvergent,
)

__all__ = [
    "DEFAULT_REL_TOL",
    "DEFAULT_ABS_TOL",
    "SolutionTrajectory",
    "QuadratureResult",
    "TailHint",
    "solve_ivp",
    "solve_first_order",
    "integrate",
    "extrapolate_limit",
    "central_derivative",
]

DEFAULT_REL_TOL = 1e-10
DEFAULT_ABS_TOL = 1e-10

# Richardson exponent sequences, one entry per elimination level.
_MODELS = {
    "power": (1, 2, 3, 4, 5, 6),
    # c1 log(R)/R + c0/R needs the 1/R factor eliminated twice.
    "log-power": (1, 1, 2, 2, 3, 3),
}


@dataclass(frozen=True, eq=False)
class SolutionTrajectory:
    """Dense solution of ``y'' = lambda(t) y`` on ``[grid[0], grid[-1]]``.

    Calling the trajectory evaluates ``y``; :meth:`derivative` evaluates
    ``y'``.  At stored grid points the stored values are returned verbatim.
    """

    grid: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray
    interpolator: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    tolerance_used: float

    @property
    def t_max(self) -> float:
        return float(self.grid[-1])

    @property
    def error_estimate(self) -> float:
        """Nominal global error bound at ``t_max``."""
        return self.tolerance_used * max(1.0, abs(float(self.values[-1])))

    def _state(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t_arr < self.grid[0]) or np.any(t_arr > self.grid[-1]):
            raise ValueError(
                f"evaluation outside [{self.grid[0]}, {self.grid[-1]}]")
        state = np.array(self.interpolator(t_arr), dtype=float).reshape(2, -1)
        idx = np.searchsorted(self.grid, t_arr)
        idx = np.clip(idx, 0, self.grid.size - 1)
        hit = self.grid[idx] == t_arr
        state[0, hit] = self.values[idx[hit]]
        state[1, hit] = self.derivatives[idx[hit]]
        return state

    def __call__(self, t):
        out = self._state(t)[0]
        return out if np.ndim(t) else float(out[0])

    def derivative(self, t):
        out = self._state(t)[1]
        return out if np.ndim(t) else float(out[0])


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    truncation_point: float | None = None


@dataclass(frozen=True)
class TailHint:
    """What is known about an integrand at infinity.

    support:
        The integrand vanishes identically beyond this abscissa.
    exponent:
        The integrand decays like ``t**-exponent``.
    scale:
        Characteristic length; the first truncation point is
        ``max(1, 10 * scale)``.
    """

    support: float | None = None
    exponent: float | None = None
    scale: float = 1.0


class _PiecewiseSolution:
    """Concatenation of several scipy dense outputs over adjacent segments."""

    def __init__(self, pieces, dim):
        self._pieces = pieces
        self._dim = dim
        self._edges = np.array([p.t_max for p in pieces[:-1]])

    def __call__(self, t):
        t = np.atleast_1d(t)
        which = np.searchsorted(self._edges, t, side="left")
        out = np.empty((self._dim, t.size))
        for k in np.unique(which):
            mask = which == k
            out[:, mask] = np.asarray(self._pieces[k](t[mask])).reshape(-1, mask.sum())
        return out


def _run(rhs, t_span, y0, rel_tol, abs_tol, breakpoints=()):
    """Integrate a first-order system piecewise, splitting at breakpoints."""
    t0, t1 = t_span
    cuts = sorted({float(b) for b in breakpoints if t0 < b < t1})
    edges = [t0, *cuts, t1]
    ts, ys, pieces = [np.array([t0])], [np.asarray(y0, float)[:, None]], []
    state = np.asarray(y0, dtype=float)
    for a, b in zip(edges[:-1], edges[1:]):
        sol = _spi.solve_ivp(rhs, (a, b), state, method="DOP853",
                             rtol=rel_tol, atol=abs_tol, dense_output=True)
        if sol.status != 0:
            if "step size" in sol.message.lower():
                raise StepUnderflow(f"step size collapsed near t={sol.t[-1]:.6g}")
            raise NumericalError(sol.message)
        if not np.all(np.isfinite(sol.y)):
            raise NonFiniteCoefficient("solution left the finite range")
        ts.append(sol.t[1:])
        ys.append(sol.y[:, 1:])
        pieces.append(sol.sol)
        state = sol.y[:, -1]
    return np.concatenate(ts), np.concatenate(ys, axis=1), _PiecewiseSolution(pieces, state.size)


def solve_ivp(lam: Callable[[float], float], y0: float, y0p: float,
              t_max: float, rel_tol: float = DEFAULT_REL_TOL,
              breakpoints: Sequence[float] = ()) -> SolutionTrajectory:
    """Solve ``y'' = lam(t) y`` with ``y(0) = y0``, ``y'(0) = y0p`` on ``[0, t_max]``.

    ``breakpoints`` are abscissae where ``lam`` is only continuous (kinks,
    support edges); integration restarts there.
    """
    if not 0.0 < rel_tol <= 1e-3:
        raise ValueError("rel_tol must lie in (0, 1e-3]")
    if not t_max > 0:
        raise ValueError("t_max must be positive")

    def rhs(t, state):
        c = float(lam(t))
        if not math.isfinite(c):
            raise NonFiniteCoefficient(f"lambda({t!r}) = {c!r}")
        return [state[1], c * state[0]]

    abs_tol = rel_tol * 1e-2 * max(abs(y0), abs(y0p), 1.0)
    grid, states, dense = _run(rhs, (0.0, float(t_max)), [y0, y0p],
                               rel_tol, abs_tol, breakpoints)
    return SolutionTrajectory(grid=grid, values=states[0].copy(),
                              derivatives=states[1].copy(),
                              interpolator=dense, tolerance_used=rel_tol)


def solve_first_order(rhs, y0, t_max, rel_tol=1e-12, abs_tol=1e-14,
                      breakpoints=()):
    """Scalar or vector first-order IVP on ``[0, t_max]``; returns ``(t, y, dense)``."""
    return _run(rhs, (0.0, float(t_max)), np.atleast_1d(y0), rel_tol, abs_tol,
                breakpoints)


def _checked(f):
    def g(t):
        v = float(f(t))
        if not math.isfinite(v):
            raise NonFiniteIntegrand(f"integrand({t!r}) = {v!r}")
        return v
    return g


def _finite_pieces(a, b, scale):
    """Split ``[a, b]`` geometrically so QUADPACK sees O(1) relative widths."""
    step = max(scale, 1e-300)
    edges = [a]
    while b - edges[-1] > 4.0 * step:
        edges.append(edges[-1] + step)
        step *= 4.0
    edges.append(b)
    return edges


def _quad(f, a, b, abs_tol, rel_tol, points=None):
    val, err, *rest = _spi.quad(f, a, b, epsabs=abs_tol, epsrel=rel_tol,
                                limit=500, points=points, full_output=1)
    return val, err


def integrate(f: Callable[[float], float], a: float, b: float,
              abs_tol: float = DEFAULT_ABS_TOL,
              tail_hint: TailHint | None = None, rel_tol: float = 0.0,
              points: Sequence[float] = (), max_doublings: int = 80
              ) -> QuadratureResult:
    """Adaptive quadrature of ``f`` over ``[a, b]``; ``b`` may be ``inf``.

    For a semi-infinite range the interval is cut at ``T0 = max(1, 10*scale)``
    and extended by doubling until one increment drops below ``abs_tol/4``.
    The remaining tail is estimated from the ratio of the last two increments
    (geometric decay of increments is exact for power laws), added to the
    value, and its full size charged to the error estimate.
    """
    hint = tail_hint or TailHint()
    g = _checked(f)
    scale = max(hint.scale, 1e-12)

    if math.isinf(b) and hint.support is not None:
        b = max(a, float(hint.support))
        points = tuple(points) + (b,)
    if not math.isinf(b):
        if b <= a:
            return QuadratureResult(0.0, 0.0, None)
        edges = sorted(set(_finite_pieces(a, b, scale)
                           + [p for p in points if a < p < b]))
        budget = abs_tol / max(len(edges) - 1, 1)
        total = err = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            v, e = _quad(g, lo, hi, budget, rel_tol)
            total += v
            err += e
        if err > max(abs_tol, rel_tol * abs(total)):
            raise AccuracyNotReached(
                f"quadrature error {err:.3g} above tolerance on [{a}, {b}]")
        return QuadratureResult(total, err, None)

    t_cut = max(1.0, 10.0 * scale, a + 1.0)
    head = integrate(f, a, t_cut, abs_tol / 2, rel_tol=rel_tol,
                     points=[p for p in points if a < p < t_cut],
                     tail_hint=TailHint(scale=scale))
    total, err = head.value, head.abs_error_estimate
    increments = []
    for _ in range(max_doublings):
        piece = integrate(f, t_cut, 2.0 * t_cut, abs_tol / 8, rel_tol=rel_tol,
                          tail_hint=TailHint(scale=t_cut / 4))
        total += piece.value
        err += piece.abs_error_estimate
        increments.append(piece.value)
        t_cut *= 2.0
        if abs(piece.value) < abs_tol / 4:
            break
    else:
        raise TailNotConvergent(
            f"increment {increments[-1]:.3g} still above {abs_tol / 4:.3g} "
            f"at truncation point {t_cut:.3g}")

    tail = _tail_estimate(increments, g, t_cut, hint)
    total += tail
    err += abs(tail)
    return QuadratureResult(total, err, t_cut)


def _tail_estimate(increments, f, t_cut, hint):
    last = increments[-1]
    if last == 0.0:
        return 0.0
    if len(increments) >= 2 and increments[-2] != 0.0:
        q = last / increments[-2]
        if 0.0 < q < 1.0:
            return last * q / (1.0 - q)
    if hint.exponent is not None and hint.exponent > 1.0:
        return t_cut * f(t_cut) / (hint.exponent - 1.0)
    return last


def extrapolate_limit(samples: Sequence[tuple[float, float]],
                      model: str | Sequence[float] = "power",
                      noise: float = 0.0) -> tuple[float, float]:
    """Limit of a sequence sampled at geometrically increasing ``R``.

    ``model`` names the asymptotic expansion in ``1/R`` whose leading
    terms are eliminated, one per extra sample: ``"power"`` removes
    ``R**-1, R**-2, ...`` and ``"log-power"`` removes ``R**-1 log R`` and
    ``R**-1`` first.  An explicit exponent sequence is also accepted.

    ``noise`` is the absolute uncertainty of each sample; increments below
    its amplified size are not taken as evidence of divergence.

    Returns ``(limit, error)`` where ``error`` is the size of the last
    elimination increment.
    """
    if len(samples) < 3:
        raise InsufficientSamples("need at least three samples")
    radii = np.array([s[0] for s in samples], dtype=float)
    vals = np.array([s[1] for s in samples], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("non-finite sample value")
    ratios = radii[1:] / radii[:-1]
    q = ratios[0]
    if q < 2.0 or not np.allclose(ratios, q, rtol=1e-9, atol=0.0):
        raise ValueError("radii must grow by one fixed ratio >= 2")
    exps = _MODELS[model] if isinstance(model, str) else tuple(model)
    if len(exps) < len(vals) - 1:
        raise ValueError("model has too few exponents for the sample count")

    row = vals
    best = [row[-1]]
    amplification = 1.0
    for p in exps[: len(vals) - 1]:
        factor = q ** p
        row = (factor * row[1:] - row[:-1]) / (factor - 1.0)
        amplification *= (factor + 1.0) / (factor - 1.0)
        best.append(row[-1])
    steps = np.abs(np.diff(best))
    floor = max(64 * np.finfo(float).eps * max(1.0, abs(best[-1])),
                abs(noise) * amplification)
    if steps.size >= 2 and steps[-1] > steps[-2] + floor:
        raise NonMonotoneTail(
            f"eliminations diverge: increments {steps[-2]:.3g} -> {steps[-1]:.3g}")
    return float(best[-1]), float(steps[-1])


def central_derivative(f, t, step):
    """Five-point centred difference; one-sided where ``t - 2*step < 0``."""
    t = np.asarray(t, dtype=float)
    step = np.asarray(step, dtype=float) * np.ones_like(t)
    central = t - 2 * step >= 0
    out = np.empty_like(t)
    if np.any(central):
        tc, hc = t[central], step[central]
        out[central] = (f(tc - 2 * hc) - 8 * f(tc - hc) + 8 * f(tc + hc)
                        - f(tc + 2 * hc)) / (12 * hc)
    if np.any(~central):
        tf, hf = t[~central], step[~central]
        out[~central] = (-25 * f(tf) + 48 * f(tf + hf) - 36 * f(tf + 2 * hf)
                         + 16 * f(tf + 3 * hf) - 3 * f(tf + 4 * hf)) / (12 * hf)
    return out
