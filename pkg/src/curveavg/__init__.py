"""Exact discrete averaging operators along integer polynomial curves."""

from .analysis import (ExtremizerFamily, FitResult, fit_exponent, make_extremizer,
                       moment_norm, riesz_diagram_data, rwt_ratio, rwt_stats,
                       theorem_consistency_scan)
from .curves import (AffineTransform, Curve, CurveError, Dilation, Shear,
                     TransformError, Translation, apply_transform, curve_to_text,
                     eval_curve, moment_curve, parse_curve, project,
                     reduce_canonical, total_degree)
from .diophantine import (BudgetExceeded, CountRecord, DifferenceQuotient,
                          FactorCell, count_homogeneous, count_inhomogeneous,
                          count_lemma1, count_lemma2, count_lemma3,
                          difference_quotient, max_inhomogeneous,
                          ordered_factorizations)
from .exponents import (ExponentPair, classify_exponents, conjectured_constant,
                        critical_exponent, critical_vertex)
from .lattice import (RestrictedSequence, SparseFunction, SparseSet,
                      adjoint_unnormalized, alpha_beta, average,
                      average_unnormalized, lq_norm, pairing, power_sum,
                      restricted_average)
from .polynomials import IntPoly, PolyParseError, divisors, parse_poly, poly_to_text
from .refinement import (RefinedSets, RefinementTrace, Slice, build_tower,
                         multiplicity, prune_last_slice, psi, refine,
                         slice_members, verify_subcritical_instance)

__version__ = "0.1.0"
