"""
The comparison sandwich j <= y <= X
===================================

For a decay bound ``lambda`` and a starting slope ``k`` the solution of
``y'' = lambda y`` is trapped between two lines.  Here the bound is a
triangle supported on ``[0, 3]``; past the support ``y`` is a line too.
"""

import numpy as np

from willmorekit.associated import AssociatedFunction
from willmorekit.comparison import (
    check_elementary_inequalities,
    decay_classification,
    make_input,
    solve_comparison,
)

lam = AssociatedFunction.triangular(1.0, 3.0)
sol = solve_comparison(make_input(lam, 0.4, n=3), t_max=100.0)

for t in (0.0, 1.0, 3.0, 10.0, 100.0):
    print(f"t={t:>5g}: j={sol.lower_line(t):9.4f}  y={sol.y(t):9.4f}  X={sol.upper_line(t):9.4f}  "
          f"theta={sol.ratio(t):.6f}")

# Every inequality reports its worst scaled margin on the grid.
report = check_elementary_inequalities(sol)
for name, margin in report.margins.items():
    print(f"{name:>20}: worst margin {margin:+.3e} at t={report.where[name]:.3g}")

# The ratio y/upper_line falls first, then creeps back up once the support is behind us.
pattern = decay_classification(sol, 100.0)
print(f"pattern {pattern.label}, turning point near t={pattern.tau:.3f}")
print("slope beyond the support:", np.ptp(np.diff(sol.y(np.linspace(4, 100, 9)))) < 1e-9)
