"""Numerical verification of sharp Willmore-type inequalities on warped products.

Submodules
----------
numerics
    ODE integration, quadrature and limit extrapolation.
manifold
    Warped products, warps, curvature bounds, condition probes, builtins.
comparison
    Decay constants and the scalar Jacobi comparison with its checks.
avr
    Tube volumes and asymptotic volume ratios.
willmore
    The inequality, equality classification and corollaries.
cli
    Command-line front end.
"""

from .associated import AssociatedFunction
from .avr import AvrEstimate, estimate_avr, sphere_ball_constants, volume_ratio, tube_volume
from .comparison import DecayConstants, decay_constants, solve_comparison
from .config import load_config, parse_config
from .errors import *  # noqa: F401,F403
from .manifold import (
    FiberManifold,
    WarpedProduct,
    builtin,
    check_conditions,
    envelope_lambda,
    from_profile,
    lambda_bounds,
)
from .willmore import VerificationReport, prepare, verify_inequality

__version__ = "0.1.0"
