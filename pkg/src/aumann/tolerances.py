"""Every numerical tolerance used by the package, in one table.

Values are absolute unless noted. Functions take these as defaults; callers
may override per call.
"""

# Normalization: probability weights, density-operator traces, and GPT unit
# values must land within this distance of 1.
WEIGHT_SUM_TOL = 1e-9

# Eigenvalue floor for "positive semidefinite": eigenvalues below -PSD_EIG_TOL
# reject the matrix, values in [-PSD_EIG_TOL, 0) are treated as zero.
PSD_EIG_TOL = 1e-9

# Max |M - M^dagger| entry accepted before symmetrizing a near-Hermitian input.
HERMITIAN_TOL = 1e-12

# Eigenvalues at or below this count as zero when building pseudo-inverse
# square roots and support projectors.
SUPPORT_CUTOFF = 1e-12

# Default matching tolerance for posterior equality (classical), trace-norm
# state equality (quantum), and coordinate max-norm equality (GPT). Also the
# vacuity cutoff used by the verify_* operations.
MATCH_TOL = 1e-9

# A cell or event with mass at or below this is considered null: conditioning
# on it raises and its worlds are excluded from agreement-event matching.
NULL_MASS_TOL = 1e-12

# Residual bound for nonnegative-combination feasibility (polyhedral cones).
CONE_FEAS_TOL = 1e-8
