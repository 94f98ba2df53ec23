"""
Decay constants of a Schwarzschild exterior
===========================================

The curvature envelope of the spatial Schwarzschild exterior is
``m / (2 h^3)``, and its two moments do not depend on the mass the way
one might guess: ``b1`` scales like ``1/m`` while ``b0`` is the same
for every mass.
"""

import math

from willmorekit.comparison import decay_constants
from willmorekit.manifold import builtin, lambda_bounds

# Build the exterior for a few masses and integrate the envelope.
for m in (1.0, 2.0, 5.0):
    W = builtin("schwarzschild", mass=m)
    c = decay_constants(W.envelope)
    print(f"m={m:g}: b0={c.b0:.12f}  b1={c.b1:.12f}  (2/(3m)={2 / (3 * m):.12f})")

print(f"(1 + log 4)/3 = {(1 + math.log(4)) / 3:.12f}")

# The envelope is the radial bound itself: the tangential bound is smaller.
W = builtin("schwarzschild", mass=2.0)
for r in (0.0, 1.0, 10.0, 100.0):
    lam1, lam2 = lambda_bounds(W, r)
    print(f"r={r:>6g}: lambda1={lam1:.6e} lambda2={lam2:+.6e} envelope={W.envelope(r):.6e}")
