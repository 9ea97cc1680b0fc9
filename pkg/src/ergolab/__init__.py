"""Ergotropy, entropy, and state-space distances with Monte Carlo concentration experiments."""

__version__ = "0.1.0"

from .matcore import (
    ComplexMatrixError,
    DensityMatrix,
    EigenSolverError,
    HermitianOperator,
    HermiticityError,
    MatcoreError,
    PositivityError,
    Spectrum,
    TraceError,
    hermitian_eig,
    psd_sqrt,
    schatten_norm,
    validate_density,
)
from .sampler import (
    LocalHamiltonianSpec,
    RngStream,
    build_k_local_hamiltonian,
    sample_bures_state,
    sample_ginibre,
    sample_gue,
    sample_haar_unitary,
    sample_hs_state,
    sample_ngue_hamiltonian,
    sample_pure_state,
)
from .quantities import (
    ErgotropyResult,
    WorkStatistics,
    ergotropy,
    extraction_unitary,
    normalize_hamiltonian,
    normalized_entropy,
    passive_state,
    von_neumann_entropy,
    work_variance,
)
from .metrics import (
    DistanceReport,
    bures_angle,
    bures_distance,
    canonical_purification,
    distance_report,
    eigenvalue_l1_deviation,
    fidelity,
    hs_distance,
    trace_distance,
)
from .bounds import (
    EntropyBuresBounds,
    LevyParameters,
    LipschitzBounds,
    binary_entropy,
    entropy_bures_bounds,
    entropy_bures_lipschitz,
    entropy_fannes_bound,
    ergotropy_lipschitz_bounds,
    levy_parameters,
    levy_tail_bound,
)
from .experiments import (
    EnsembleRecord,
    FitResult,
    SuiteReport,
    SweepConfig,
    fit_concentration_exponents,
    inset_transform,
    run_average_sweep,
    run_tail_experiment,
    run_verification_suite,
    select_common_ell,
)

__all__ = [name for name in dir() if not name.startswith("_")]
