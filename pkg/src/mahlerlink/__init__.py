"""Mahler volumes, filled joins of pseudosphere necks and invariant linking kernels."""

__version__ = "0.1.0"

from .bodies import (ConvexBody, ball, cross_polytope, cube, difference_body,
                     dual_point, ellipsoid, hanner, linear_image, lp_ball,
                     make_body, polar, simplex)
from .core import (DimensionError, GeometryError, IntegrationError, McConfig,
                   RunReport, Signature, duplex_inner, indef_inner, sphere_grid)
from .kernels import (energy, residual, s3_kernel, solve_hyperbolic_kernel,
                      solve_kernel, solve_pseudosphere_kernel, solve_sphere_kernel)
from .linking import (ClosedCurve, LinkReport, cone_mc_estimator, crossing_oracle,
                      link_hyperbolic, link_sphere, trig_curve, window_density)
from .necks import (Neck, body_necks, diamond_volume, filled_join_volume,
                    flat_neck, graph_neck, random_graph_neck, validate_neck,
                    verify_starlike, weighted_invariant)
from .probes import (ProbeReport, diamond_convexity_sample, hanner_equality,
                     isotropic_constant, pairing_tail, xy_second_moment)
from .volumes import (check_inequalities, closed_form_constants, mahler_volume,
                      volume)

__all__ = [name for name in dir() if not name.startswith("_")]
