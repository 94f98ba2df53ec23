"""
A manifold from a configuration file
====================================

Any warp can be supplied as a tabulated profile ``omega(s)``; the
library inverts ``r = F(s)`` itself.  This one perturbs Schwarzschild
with a short-range bump.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from willmorekit.config import load_config
from willmorekit.willmore import prepare, verify_inequality

# Tabulate well past the radii used for the volume ratio: beyond the last
# node omega is held constant, which would show up as a kink in h'.
s = 2.0 + np.concatenate([[0.0], np.geomspace(1e-4, 1e8, 3000)])
omega = 1.0 - 2.0 / s + 0.5 * np.exp(-(s - 2.0)) * (1.0 - np.exp(-(s - 2.0)))
config = {
    "name": "bumped-schwarzschild",
    "fiber": {"dim": 2, "round_sphere": True},
    "warp": {"profile": {"s": s.tolist(), "omega": omega.tolist()}},
}

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "bumped.json"
    path.write_text(json.dumps(config), encoding="utf-8")
    W = load_config(path)

# Spline data carries less smoothness than a closed form, so ask for a
# looser quadrature tolerance than the 1e-10 default.
ctx = prepare(W, abs_tol=1e-8)
print("flags:", ctx.flags.as_dict())
print(f"b0={ctx.constants.b0:.6f} b1={ctx.constants.b1:.6f} AVR={ctx.avr.value:.6f}")
rep = verify_inequality(W, 0.0, ctx)
print(f"horizon: lhs={rep.lhs:.5f} rhs={rep.rhs:.5f} class={rep.equality_class}")
