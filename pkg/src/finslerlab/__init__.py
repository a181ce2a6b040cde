"""finslerlab: numerical laboratory for projectively flat Finsler metrics.

Constructs the Funk metric of a strongly convex domain and the family of
metrics derived from it (Hilbert symmetrization, the zero-curvature
correction, Randers-type perturbations, power-series solutions of the
induced-spray equation), and verifies their curvature properties by
high-order automatic differentiation.
"""

from .curvature import (MetricSpray, ProjectiveSpray, RiemannOperator, Spray,
                        ZeroSpray, check_gradient_identity, check_inverse_pde,
                        check_rapcsak, check_self_adjoint,
                        const_curvature_residual, flag_curvature,
                        flag_curvatures, fundamental_tensor, funk_spray,
                        riemann, spray_coeffs)
from .geodesics import Trajectory, integrate, straightness_residual
from .jets import (JetDomainError, TaylorScalar, fd_partial, mixed_partial,
                   taylor_directional)
from .metrics import (FunkMetric, HilbertMetric, RandersFunkMetric,
                      SeriesMetric, ZeroCurvatureBallMetric,
                      ZeroCurvatureMetric, funk_ball_eval, funk_eval,
                      hilbert_eval, randers_funk_eval, series_metric_eval,
                      zero_curvature_ball_eval, zero_curvature_eval)
from .norms import (ConvexDomain, EllipsoidNorm, EuclideanNorm, MinkowskiNorm,
                    QuarticNorm, RandersNorm, check_minkowski,
                    ellipsoid_domain, quartic_domain, randers_domain,
                    unit_ball)
from .polyjet import JetSpace, MultiJet, jet_space

__all__ = [
    "JetDomainError", "TaylorScalar", "taylor_directional", "mixed_partial",
    "fd_partial", "JetSpace", "MultiJet", "jet_space",
    "MinkowskiNorm", "EuclideanNorm", "EllipsoidNorm", "RandersNorm",
    "QuarticNorm", "ConvexDomain", "check_minkowski", "unit_ball",
    "ellipsoid_domain", "randers_domain", "quartic_domain",
    "FunkMetric", "HilbertMetric", "ZeroCurvatureMetric",
    "ZeroCurvatureBallMetric", "RandersFunkMetric", "SeriesMetric",
    "funk_eval", "funk_ball_eval", "hilbert_eval", "zero_curvature_eval",
    "zero_curvature_ball_eval", "randers_funk_eval", "series_metric_eval",
    "Spray", "MetricSpray", "ProjectiveSpray", "ZeroSpray", "funk_spray",
    "spray_coeffs", "fundamental_tensor", "RiemannOperator", "riemann",
    "flag_curvature", "flag_curvatures", "const_curvature_residual",
    "check_rapcsak", "check_inverse_pde", "check_gradient_identity",
    "check_self_adjoint",
    "Trajectory", "integrate", "straightness_residual",
]

__version__ = "0.1.0"
