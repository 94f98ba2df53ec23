"""
Volume ratio of tubes and its limit
===================================

``Theta(R)`` compares the tube of radius ``R`` around the inner boundary
with a Euclidean ball.  Two estimators of its limit are cross-checked:
extrapolating ``Theta`` itself and extrapolating the warp slope.
"""

from willmorekit.avr import estimate_avr, volume_ratio
from willmorekit.manifold import builtin

for name, params in [("schwarzschild", {"mass": 2.0}),
                     ("reissner-nordstrom", {"mass": 3.0, "charge": 1.0}),
                     ("cone", {"slope": 0.5}),
                     ("modified-schwarzschild", {})]:
    W = builtin(name, **params)
    ratios = ", ".join(f"{volume_ratio(W, R):.5f}" for R in (1e1, 1e2, 1e3, 1e4))
    est = estimate_avr(W)
    alt, alt_err = est.alternative
    print(f"{W.describe()}")
    print(f"    Theta at 10..1e4: {ratios}")
    print(f"    limit {est.value:.9f} +- {est.error_estimate:.1e} ({est.method}); "
          f"other estimator {alt:.9f} +- {alt_err:.1e}")

# Around a horizon Theta grows towards its limit; around a cone it falls.
