"""Centralized numerical tolerances and limits.

Every tolerance used by the library lives here so the envelope is auditable in
one place. Values marked "construction" gate object creation; "validation"
values are the looser gates used by validate_density on foreign matrices.
"""

import math

# Hermiticity: max-abs anti-Hermitian part, scaled by max(1, max|entry|).
HERM_BUILD_ATOL = 1e-10
HERM_VALIDATE_ATOL = 1e-8

# Trace of a density matrix.
TRACE_BUILD_ATOL = 1e-10
TRACE_VALIDATE_ATOL = 1e-8

# Eigenvalue window treated as PSD noise and clipped to zero.
EIG_CLIP = 1e-10
# At or below this an operator is rejected as not PSD.
PSD_ERROR_FLOOR = -1e-8

# Spectrum invariants.
ORTHO_ATOL = 1e-8
RECON_RTOL = 1e-8

# Extraction unitary is canonicalized to the identity when trace-norm
# distance between rho and its passive state is at most this.
PASSIVE_CANON_ATOL = 1e-10

# Ergotropy below this has no meaningful noise-to-signal ratio.
NSR_MEAN_FLOOR = 1e-12

# Absolute slack for theorem-inequality sweeps.
SWEEP_SLACK = 1e-9

# Dense matrices only; refuse anything larger.
DIM_CAP = 4096

# Concentration constant for Levy's lemma on the purification sphere.
LEVY_ALPHA = 1.0 / (25.0 * math.pi)

# Unit-norm operator tolerance after Hamiltonian normalization.
NORM_ATOL = 1e-12
