"""Pinned empirical constants for the inequality checkers and experiments.

The inequalities exercised by this package are stated with ineffective
constants; every sweep therefore *fits* its constant and the test suite
asserts only against the floors and ceilings recorded here.  Values were
calibrated once at desk scale (N <= 4096) and are version-controlled so
that a regression in an evaluator shows up as a broken floor rather than
a silently re-fitted constant.
"""

# |w_N(b/q + dx, a/q + dt)| >= ratio * N / sqrt(q) on major arcs, q odd.
# Exact Gauss cases give ratio 1; the floor below holds across the full
# admissible sweep q <= 31, N <= 2048.
MAJOR_ARC_RATIO_FLOOR = 0.05

# |w_N| / (log N * N / (sqrt(q) (1 + N sqrt|t - a/q|))) stays below this
# over random sweeps (the envelope already carries the log factor).
BOURGAIN_RATIO_CEILING = 4.0

# min over x in [0, 1e-6/N] of the sup witness at t = 1e-7/N^2, as a
# fraction of N.
SHARPNESS_FRACTION = 0.9

# L4 norm of the sup profile is at least this multiple of N^(3/4)
# (the [0, 1e-6/N] cell alone contributes (1e-6)^(1/4) ~ 0.0316).
L4_SHARPNESS_FLOOR = 0.03

# Additive log-log slope slack absorbing log^k N factors at desk scale.
SLOPE_SLACK = 0.3

# Fitted slope window for the L4 maximal norm (target exponent 3/4).
MAXIMAL_SLOPE_RANGE = (0.70, 0.85)
MAXIMAL_R2_MIN = 0.98

# Level-set measure at alpha = 0.85, c = 1 (target exponent 3 - 4*alpha
# = -0.4, slack +0.3).
LEVELSET_SLOPE_MAX = -0.1

# Progression-norm slope in q at fixed N (target -3/4).
PROGRESSION_Q_SLOPE = -0.75
PROGRESSION_Q_SLOPE_TOL = 0.15

# Default campaign tolerance: certificate gap as a multiple of N^(3/4).
# 0.4 keeps the gap below a quarter of the c N^alpha threshold for every
# level-set cut with alpha >= 0.85, c >= 1 at N >= 256.
DEFAULT_TOLERANCE = 0.4
