"""
The slice functional and the photon sphere
==========================================

Along Schwarzschild slices the functional ``F`` first grows and then
decays; its turning point is where ``h''/h = (h'/h)^2``, the photon
sphere ``s = 3m/2``.
"""

import numpy as np

from willmorekit.manifold import builtin
from willmorekit.willmore import prepare, slice_functional, slice_functional_derivative, slice_functional_root

ctx = prepare(builtin("schwarzschild", mass=2.0))
W, c = ctx.W, ctx.constants
for r0 in np.linspace(0.0, 5.0, 6):
    print(f"r0={r0:.1f} h={float(W.h(r0)):.4f} F={slice_functional(W, c, r0):.6f} "
          f"F'={slice_functional_derivative(W, c, r0):+.6f}")

root = slice_functional_root(W, c, 0.5, 5.0)
print(f"F' vanishes at r0={root:.10f}, where h={float(W.h(root)):.10f} (3m/2 = 3)")
