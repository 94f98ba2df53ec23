"""JSON manifold configuration files.

Schema (unknown keys are rejected at every level)::

    {
      "name": "optional label",
      "fiber": {"dim": 2, "area": 12.566370614359172, "ricci_lower": 1.0,
                "round_sphere": false, "diameter": 3.141592653589793},
      "warp": one of
          {"family": "schwarzschild", "params": {"mass": 2.0, "dim": 3}}
          {"profile": {"s": [...], "omega": [...]}}
          {"samples": {"r": [...], "h": [...]}},
      "probe": {"r_probe": 1e6, "per_decade": 512, "trend_points": 8,
                "growth_factor": 10.0}
    }

``fiber`` may be ``{"round_sphere": true, "dim": d}`` alone.  Families
``schwarzschild``, ``reissner-nordstrom`` and ``modified-schwarzschild``
carry their own round fiber and reject a ``fiber`` entry.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import ConfigError, InvalidParameters
from .manifold import (
    FiberManifold,
    ProbeSettings,
    TabulatedWarp,
    WarpedProduct,
    builtin,
    cone,
    from_profile,
    BUILTIN_NAMES,
)

__all__ = ["load_config", "parse_config", "tabulated_profile"]

_TOP_KEYS = {"name", "fiber", "warp", "probe"}
_FIBER_KEYS = {"dim", "area", "ricci_lower", "round_sphere", "diameter"}
_WARP_KEYS = {"family", "params", "profile", "samples"}
_PROBE_KEYS = {"r_probe", "per_decade", "trend_points", "growth_factor"}
_FAMILY_PARAMS = {
    "schwarzschild": {"mass", "dim"},
    "reissner-nordstrom": {"mass", "charge", "dim"},
    "cone": {"slope", "offset"},
    "modified-schwarzschild": {"kappa"},
}
_OWN_FIBER = {"schwarzschild", "reissner-nordstrom", "modified-schwarzschild"}


def _reject_unknown(section: str, data: Mapping, allowed: set) -> None:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{section}: expected an object")
    extra = sorted(set(data) - allowed)
    if extra:
        raise ConfigError(f"{section}: unknown key(s) {', '.join(extra)}")


def _number(section: str, key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key}: expected a number")
    if not math.isfinite(value):
        raise ConfigError(f"{section}.{key}: must be finite")
    return float(value)


def _number_list(section: str, key: str, value: Any) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{section}.{key}: expected a nonempty list of numbers")
    return np.array([_number(section, key, v) for v in value])


def _parse_fiber(data: Mapping) -> FiberManifold:
    _reject_unknown("fiber", data, _FIBER_KEYS)
    if "dim" not in data:
        raise ConfigError("fiber.dim is required")
    dim = data["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int):
        raise ConfigError("fiber.dim: expected an integer")
    if data.get("round_sphere", False):
        if "area" in data or "ricci_lower" in data:
            raise ConfigError("fiber: round_sphere fixes area and ricci_lower")
        fib = FiberManifold.round_sphere(dim)
        if "diameter" in data:
            raise ConfigError("fiber: round_sphere fixes the diameter")
        return fib
    for key in ("area", "ricci_lower"):
        if key not in data:
            raise ConfigError(f"fiber.{key} is required")
    diameter = data.get("diameter")
    return FiberManifold(dim, _number("fiber", "area", data["area"]),
                         _number("fiber", "ricci_lower", data["ricci_lower"]), False,
                         None if diameter is None else _number("fiber", "diameter", diameter))


def _parse_probe(data: Mapping | None) -> ProbeSettings:
    if data is None:
        return ProbeSettings()
    _reject_unknown("probe", data, _PROBE_KEYS)
    kwargs = {}
    for key, value in data.items():
        num = _number("probe", key, value)
        kwargs[key] = int(num) if key in ("per_decade", "trend_points") else num
    return ProbeSettings(**kwargs)


def tabulated_profile(s, omega):
    """Spline ``omega`` through samples, held constant beyond the last node."""
    s, omega = np.asarray(s, dtype=float), np.asarray(omega, dtype=float)
    if s.size < 4 or s.size != omega.size or np.any(np.diff(s) <= 0):
        raise ConfigError("profile: need >= 4 samples with increasing s")
    spline = CubicSpline(s, omega)
    s_end, w_end = float(s[-1]), float(omega[-1])

    def w(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= s_end, spline(np.minimum(x, s_end)), w_end)
        return out if out.ndim else float(out)

    def dw(x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= s_end, spline(np.minimum(x, s_end), 1), 0.0)
        return out if out.ndim else float(out)
    return w, dw


def parse_config(data: Mapping) -> WarpedProduct:
    """Build a :class:`WarpedProduct` from a decoded configuration object."""
    _reject_unknown("config", data, _TOP_KEYS)
    if "warp" not in data:
        raise ConfigError("config.warp is required")
    warp = data["warp"]
    _reject_unknown("warp", warp, _WARP_KEYS)
    sources = [k for k in ("family", "profile", "samples") if k in warp]
    if len(sources) != 1:
        raise ConfigError("warp: give exactly one of family, profile, samples")
    probe = _parse_probe(data.get("probe"))
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise ConfigError("config.name: expected a string")

    try:
        if "family" in warp:
            family = str(warp["family"]).replace("_", "-").lower()
            if family not in BUILTIN_NAMES:
                raise ConfigError(f"warp.family: unknown family {warp['family']!r}")
            params = warp.get("params", {})
            _reject_unknown("warp.params", params, _FAMILY_PARAMS[family])
            params = {k: _number("warp.params", k, v) for k, v in params.items()}
            if family in _OWN_FIBER:
                if "fiber" in data:
                    raise ConfigError(f"fiber: family {family} fixes the fiber")
                W = builtin(family, **params)
            else:
                fiber = _parse_fiber(data["fiber"]) if "fiber" in data else None
                W = cone(params.get("slope", 1.0), params.get("offset", 1.0), fiber=fiber)
        else:
            if "params" in warp:
                raise ConfigError("warp.params only applies to families")
            if "fiber" not in data:
                raise ConfigError("config.fiber is required for profile or sample warps")
            fiber = _parse_fiber(data["fiber"])
            if "profile" in warp:
                prof = warp["profile"]
                _reject_unknown("warp.profile", prof, {"s", "omega"})
                s = _number_list("warp.profile", "s", prof.get("s"))
                om = _number_list("warp.profile", "omega", prof.get("omega"))
                w, dw = tabulated_profile(s, om)
                W = from_profile(w, float(s[0]), fiber, domega=dw, name=name or "profile")
            else:
                smp = warp["samples"]
                _reject_unknown("warp.samples", smp, {"r", "h"})
                r = _number_list("warp.samples", "r", smp.get("r"))
                h = _number_list("warp.samples", "h", smp.get("h"))
                W = WarpedProduct(fiber, TabulatedWarp(r, h), name or "tabulated")
    except InvalidParameters as exc:
        raise ConfigError(str(exc)) from exc

    return WarpedProduct(W.fiber, W.warp, name or W.name, dict(W.params), probe,
                         W.inner_fill_radius)


def load_config(path: str | Path) -> WarpedProduct:
    """Read a UTF-8 JSON configuration file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return parse_config(data)
