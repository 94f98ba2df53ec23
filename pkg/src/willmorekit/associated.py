"""Curvature-decay bounds ``lambda(t)`` and their builtin families."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import InadmissibleLambda
from .numerics import TailHint

__all__ = ["AssociatedFunction"]

PROVENANCES = ("envelope-derived", "user-supplied", "builtin")


@dataclass(frozen=True, eq=False)
class AssociatedFunction:
    """A nonnegative, nonincreasing decay bound on ``[0, inf)``.

    Parameters
    ----------
    evaluator:
        Vectorised callable ``t -> lambda(t)``.
    tail:
        What is known at infinity (compact support radius or decay exponent).
    provenance:
        One of ``"envelope-derived"``, ``"user-supplied"``, ``"builtin"``.
    kinks:
        Abscissae where ``lambda`` is continuous but not smooth.
    closed_form:
        Exact ``(b0, b1)`` when the family admits them; used only by tests
        and diagnostics, never by :func:`comparison.decay_constants`.
    """

    evaluator: Callable
    tail: TailHint = field(default_factory=TailHint)
    provenance: str = "user-supplied"
    kinks: tuple[float, ...] = ()
    is_zero: bool = False
    closed_form: tuple[float, float] | None = None
    label: str = ""

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")

    def __call__(self, t):
        return self.evaluator(t)

    def shifted(self, r0: float) -> "AssociatedFunction":
        """The function ``t -> lambda(r0 + t)``."""
        if r0 == 0:
            return self
        base = self.evaluator
        support = None if self.tail.support is None else max(self.tail.support - r0, 0.0)
        tail = TailHint(support=support, exponent=self.tail.exponent,
                        scale=self.tail.scale)
        kinks = tuple(k - r0 for k in self.kinks if k > r0)
        return AssociatedFunction(lambda t: base(np.asarray(t) + r0), tail,
                                  self.provenance, kinks, self.is_zero, None,
                                  f"{self.label} shifted by {r0:g}")

    def check_admissible(self, grid: Sequence[float] | None = None,
                         tol: float = 1e-12) -> None:
        """Raise :class:`InadmissibleLambda` unless nonnegative and nonincreasing on ``grid``."""
        if grid is None:
            grid = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 400)])
        vals = np.asarray(self.evaluator(np.asarray(grid, dtype=float)), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise InadmissibleLambda("lambda is not finite on the sample grid")
        if np.any(vals < -tol):
            k = int(np.argmin(vals))
            raise InadmissibleLambda(f"lambda({grid[k]:g}) = {vals[k]:.3g} < 0")
        rises = np.diff(vals) - tol * np.maximum(1.0, np.abs(vals[1:]))
        if np.any(rises > 0):
            k = int(np.argmax(rises))
            raise InadmissibleLambda(
                f"lambda increases between t={grid[k]:g} and t={grid[k + 1]:g}")

    # -- families ------------------------------------------------------------

    @classmethod
    def zero(cls) -> "AssociatedFunction":
        return cls(lambda t: np.zeros_like(np.asarray(t, dtype=float)),
                   TailHint(support=0.0), "builtin", (), True, (0.0, 0.0), "zero")

    @classmethod
    def power_law(cls, c: float, p: float) -> "AssociatedFunction":
        """``c (1 + t)**-p`` with ``p > 2``."""
        if c < 0 or p <= 2:
            raise InadmissibleLambda("power law needs c >= 0 and p > 2")
        if c == 0:
            return cls.zero()
        b1 = c / (p - 1.0)
        b0 = c / ((p - 1.0) * (p - 2.0))
        return cls(lambda t: c * (1.0 + np.asarray(t, dtype=float)) ** (-p),
                   TailHint(exponent=p), "builtin", (), False, (b0, b1),
                   f"{c:g}(1+t)^-{p:g}")

    @classmethod
    def triangular(cls, c: float, a: float) -> "AssociatedFunction":
        """``c max(0, 1 - t/a)``, supported on ``[0, a]``."""
        if c < 0 or a <= 0:
            raise InadmissibleLambda("triangular family needs c >= 0 and a > 0")
        if c == 0:
            return cls.zero()
        return cls(lambda t: c * np.maximum(0.0, 1.0 - np.asarray(t, dtype=float) / a),
                   TailHint(support=a, scale=a), "builtin", (a,), False,
                   (c * a * a / 6.0, c * a / 2.0), f"{c:g}max(0,1-t/{a:g})")

    @classmethod
    def from_callable(cls, fn: Callable[[float], float], *, support=None,
                      exponent=None, scale: float = 1.0) -> "AssociatedFunction":
        """Wrap a user callable; scalar callables are vectorised."""
        vec = np.vectorize(lambda t: float(fn(float(t))), otypes=[float])

        def ev(t):
            out = vec(t)
            return out if np.ndim(t) else float(out)
        return cls(ev, TailHint(support=support, exponent=exponent, scale=scale),
                   "user-supplied", (), False, None, getattr(fn, "__name__", "user"))

