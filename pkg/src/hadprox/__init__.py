"""Proximal maps, Moreau envelopes and convergence checks for convex
functionals on Hadamard model spaces."""

__version__ = "0.1.0"

from .spaces import (Euclidean, GeodesicSegment, HyperbolicHalfPlane, MetricSpider, Point,
                     ProductSpace, Space, cat0_comparison_check, distance, geodesic_point,
                     project_to_geodesic, weak_limit_test)
from .functionals import (Busemann, Constant, ConvexFunctional, Distance, DistanceSquared,
                          Indicator, Linear, Max, Sum, convexity_check, directional_derivative,
                          evaluate, indicator_of_set, zero)
from .prox import (ProxParams, ProxResult, SlopeBudget, moreau_envelope, prox, slope,
                   verify_prox_lemmas)
from .convergence import (ModeSpec, TailWindow, asymptotic_slope_check, cone_closure_check,
                          equi_lipschitz_check, gamma_check, integral_identity_check,
                          limit_mode_check, mosco_check, normalization_check, set_mosco_check,
                          sufficient_condition_check, theorem_verify)
from .verdict import Outcome, TheoremReport, UsageError, Verdict
