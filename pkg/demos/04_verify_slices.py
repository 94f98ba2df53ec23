"""
Checking the inequality on slices
=================================

``verify_inequality`` evaluates both sides on a slice ``{r0} x N`` and
classifies the result.  A flat cone is an equality case; the
Schwarzschild horizon is strict, and the limit ratio shows why.
"""

from willmorekit.manifold import builtin
from willmorekit.willmore import minimal_area_bound, prepare, verify_inequality

for name, params in [("cone", {}), ("cone", {"slope": 0.5}),
                     ("schwarzschild", {"mass": 2.0}), ("modified-schwarzschild", {})]:
    ctx = prepare(builtin(name, **params))
    rep = verify_inequality(ctx.W, 0.0, ctx)
    ratio = "n/a" if rep.limit_ratio is None else f"{rep.limit_ratio:.6f}"
    print(f"{ctx.W.describe():<50} lhs={rep.lhs:9.5f} rhs={rep.rhs:9.5f} "
          f"class={rep.equality_class:<12} limit ratio={ratio}")

# Moving outward keeps the gap positive.
ctx = prepare(builtin("schwarzschild", mass=2.0))
for r0 in (0.0, 1.0, 5.0, 50.0):
    print(f"r0={r0:>5g}: gap {verify_inequality(ctx.W, r0, ctx).gap:.6f}")

# A closed minimal slice cannot have less area than this.
print(f"minimal-area bound {minimal_area_bound(ctx.W, ctx.constants, ctx.avr):.6f} "
      f"vs horizon area {4 * 3.141592653589793 * 4:.6f}")
