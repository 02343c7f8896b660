"""Computation and verification toolkit for quadratic exponential sums.

Evaluates w_N(x,t) = sum_{n=1}^N e^{2 pi i (n x + n^2 t)} on points and
grids with exact phase reduction, computes certified suprema over t,
classifies times by Diophantine approximation, builds the rectangle
combinatorics of the large-value set, checks the standard pointwise and
maximal inequalities empirically, and runs scaling campaigns that turn
the governing exponents into measurable log-log slopes.
"""

from .calibration import DEFAULT_TOLERANCE
from .campaigns import (CampaignConfig, ProfileCache, ScalingFit, fit_exponent,
                        finite_o_alpha_profile, levelset_scaling,
                        maximal_norm_scaling, progression_q_scaling,
                        progression_scaling, rect_count_scaling,
                        refined_strichartz_check, run_campaign)
from .checks import (BoundCheckRecord, RatioSummary, bourgain_envelope,
                     bourgain_sweep, classical_weyl_ratio, completion_check,
                     jarnik_beta, jarnik_containment, major_arc_lower,
                     mv_local_check, sharpness_witness)
from .diophantine import (ArcBox, CFExpansion, DiophClass, Rational,
                          classify_time, continued_fraction, dirichlet_approx,
                          jarnik_witnesses, major_arc_points, totient,
                          totient_sum)
from .evaluate import (GridSpec, WeylScale, completion_sum, eval_point,
                       eval_point_batch, eval_point_naive, eval_points,
                       eval_progression, eval_t_grid, eval_x_grid,
                       rescaled_arguments)
from .rectangles import (LevelSetReport, OneDimCollection, QPartition, Rect,
                         build_collection, count_vs_bound, level_set,
                         partition_by_q, verify_one_dimensional)
from .supremum import (CertificateBudgetError, MaxProfile,
                       ResolutionCertificate, lp_norm, maximal_grid,
                       restricted_sup, sup_over_t)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
