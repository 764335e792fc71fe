"""Group Lasso estimation and verification toolkit.

Solver, closed-form tuning, design diagnostics, sparsity-pattern recovery,
seeded simulation, and a Monte Carlo harness checking empirical errors
against the theoretical bounds.
"""

from . import _kern
from .bounds import (
    CoverageReport,
    TheoreticalBounds,
    TrialRecord,
    bias_oracle_rhs,
    compare_estimators,
    lasso_lower_rhs,
    multitask_oracle_rhs,
    nongaussian_rhs,
    oracle_rhs,
    trial_seed,
    verify_chi2_tail,
    verify_maximal_moment,
    verify_nongaussian,
    verify_oracle,
    verify_pattern_recovery,
)
from .diagnostics import (
    DiagnosticsReport,
    coherence_alpha,
    diagnose,
    re_from_coherence,
    re_sampled,
    restricted_eigenvalues,
    x_star,
)
from .errors import (
    CombinatorialBlowupError,
    CoverageError,
    DegenerateError,
    DimensionError,
    DomainError,
    EmptyGroupError,
    GroupLassoError,
    NonConstantDiagonalError,
    NonFiniteError,
    OverlapError,
    ShapeMismatchError,
)
from .model import (
    GramSummary,
    GroupPartition,
    MultiTaskSpec,
    Problem,
    assemble_multitask,
    gram_summary,
    mixed_norm,
    singleton_partition,
    validate_partition,
)
from .recovery import SupportEstimate, estimate_support, min_signal_ok, pnorm_radius
from .simulate import (
    SimSpec,
    SimulatedDataset,
    gen_beta,
    gen_design,
    gen_noise,
    simulate_dataset,
)
from .solver import (
    SolveOptions,
    SolveResult,
    estimate_phi_max,
    group_prox,
    kkt_residual,
    solve_group_lasso,
    solve_lasso,
)
from .tuning import (
    TunedLambda,
    lambda_groups,
    lambda_multitask,
    lambda_nongaussian,
    moment_constant,
    threshold_constants,
)

KERNEL_IMPL = _kern.IMPL

__version__ = "0.1.0"
