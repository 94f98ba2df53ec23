"""Tube volumes, the volume ratio ``Theta(R)`` and asymptotic volume ratios.

Two independent estimators of the asymptotic ratio are provided: Richardson
extrapolation of ``Theta(R)`` and the slope limit ``lim h'(R)``.  Neither
needs anything from a warped product beyond ``fiber``, ``warp`` and ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .errors import MethodDisagreement
from .numerics import extrapolate_limit, integrate

__all__ = [
    "AvrEstimate",
    "sphere_ball_constants",
    "tube_volume",
    "outward_tube_volume",
    "volume_ratio",
    "volume_ratio_integral_form",
    "volume_ratio_samples",
    "estimate_avr",
    "DEFAULT_RADII",
]

DEFAULT_RADII = (1e2, 1e3, 1e4)
_QUAD_REL = 1e-13


@dataclass(frozen=True)
class AvrEstimate:
    """Asymptotic volume ratio with provenance.

    ``alternative`` holds ``(value, error)`` of the estimator that was not
    selected, when both ran.
    """

    value: float
    method: str
    error_estimate: float
    samples: tuple[tuple[float, float], ...] = ()
    alternative: tuple[float, float] | None = None
    slope_samples: tuple[tuple[float, float], ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.method not in ("tube-extrapolation", "warp-slope-limit", "exact"):
            raise ValueError(f"unknown method {self.method!r}")


def sphere_ball_constants(n: int) -> tuple[float, float]:
    """``(|S^(n-1)|, omega_n)``: unit-sphere area and unit-ball volume in ``R^n``.

    Evaluated through ``lgamma`` so large ``n`` underflows gracefully
    instead of overflowing.
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    log_area = math.log(2.0) + 0.5 * n * math.log(math.pi) - math.lgamma(0.5 * n)
    area = math.exp(log_area)
    return area, area / n


def _power(W):
    return W.n - 1


def outward_tube_volume(W, r0: float, R: float) -> float:
    """``|N| * integral_{r0}^{r0+R} h^(n-1)``: the outward tube of radius ``R`` over slice ``r0``."""
    if R < 0 or r0 < 0:
        raise ValueError("radii must be nonnegative")
    if R == 0:
        return 0.0
    p = _power(W)
    res = integrate(lambda t: W.warp.value(t) ** p, r0, r0 + R, abs_tol=1e-300,
                    rel_tol=_QUAD_REL)
    return W.fiber.area * res.value


def tube_volume(W, R: float) -> float:
    """Volume of the tube of radius ``R`` around the inner boundary ``r = 0``."""
    if not R > 0:
        raise ValueError("R must be positive")
    return outward_tube_volume(W, 0.0, R)


def volume_ratio(W, R: float) -> float:
    """``tube_volume(R) / (omega_n R^n)``."""
    _, ball = sphere_ball_constants(W.n)
    return tube_volume(W, R) / (ball * R ** W.n)


def volume_ratio_integral_form(W, R: float) -> float:
    """Same ratio as :func:`volume_ratio`, evaluated as ``(|N|/|S|) int h^(n-1) / int t^(n-1)``."""
    sphere, _ = sphere_ball_constants(W.n)
    p = _power(W)
    num = integrate(lambda t: W.warp.value(t) ** p, 0.0, R, abs_tol=1e-300, rel_tol=_QUAD_REL)
    den = integrate(lambda t: t ** p, 0.0, R, abs_tol=1e-300, rel_tol=_QUAD_REL)
    return W.fiber.area / sphere * num.value / den.value


def volume_ratio_samples(W, radii: Sequence[float]) -> tuple[tuple[float, float], ...]:
    return tuple((float(R), volume_ratio(W, R)) for R in radii)


def _default_radii(W):
    base = max(1.0, float(W.warp.value(0.0)))
    return tuple(r * base for r in DEFAULT_RADII)


def estimate_avr(W, radii: Sequence[float] | None = None,
                 cross_check: bool = True) -> AvrEstimate:
    """Asymptotic volume ratio by two estimators, cross-checked.

    The tube estimator extrapolates ``Theta(R)`` whose corrections go like
    ``log(R)/R`` and ``1/R``; the slope estimator extrapolates ``h'(R)`` and
    returns ``(|N|/|S^(n-1)|) L^(n-1)``.  The estimate with the smaller
    error is returned; :class:`MethodDisagreement` is raised if the two
    differ by more than their combined error.
    """
    radii = tuple(radii) if radii is not None else _default_radii(W)
    sphere, _ = sphere_ball_constants(W.n)
    p = _power(W)
    fiber_ratio = W.fiber.area / sphere

    samples = volume_ratio_samples(W, radii)
    tube_val, tube_err = extrapolate_limit(samples, "log-power")

    slopes = tuple((float(R), float(W.warp.d1(R))) for R in radii)
    limit, lim_err = extrapolate_limit(slopes, "power")
    limit = max(limit, 0.0)
    slope_val = fiber_ratio * limit ** p
    slope_err = fiber_ratio * p * max(limit, lim_err) ** (p - 1) * lim_err

    floor = 1e-12 * max(1.0, abs(slope_val))
    if cross_check and abs(tube_val - slope_val) > tube_err + slope_err + floor:
        raise MethodDisagreement(
            f"tube estimate {tube_val:.12g} +- {tube_err:.3g} vs slope estimate "
            f"{slope_val:.12g} +- {slope_err:.3g}")

    if slope_err <= tube_err:
        return AvrEstimate(max(slope_val, 0.0), "warp-slope-limit", slope_err, samples,
                           (tube_val, tube_err), slopes)
    return AvrEstimate(max(tube_val, 0.0), "tube-extrapolation", tube_err, samples,
                       (slope_val, slope_err), slopes)
