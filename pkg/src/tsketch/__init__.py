"""Sparse row-wise Kronecker sub-Gaussian sketching for constrained least squares."""

from .distributions import (
    FactorDistribution,
    MaskedFactorSample,
    effective_entry_bound,
    from_name,
    gaussian,
    rademacher,
    sample_factor,
)
from .sketch import (
    ResourceLimitError,
    SketchSpec,
    TensorSketch,
    apply,
    apply_kron_column,
    densify,
    max_xi_inf_norm,
    sample_sketch,
    sketch_matrix,
)
from .solvers import (
    L1SolverOptions,
    LsSolution,
    error_ratio,
    project_l1,
    solve_l1_constrained,
    solve_unconstrained,
)
from .problems import (
    ProblemInstance,
    gen_ill_conditioned,
    gen_sparse_recovery,
    gen_structured,
    gen_well_conditioned,
)
from .geometry import (
    DimensionBound,
    WidthEstimate,
    sketch_dim_bound,
    subspace_width_mc,
    width_bound_l1_cone,
    width_bound_rank,
)
from .concentration import (
    EmbeddingErrorReport,
    TailCurve,
    hanson_wright_tail,
    measure_sup_embedding_error,
    sample_unit_sphere_subspace,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    ResultRecord,
    aggregate_mean,
    expected_record_count,
    fit_loglog_slope,
    run_experiment,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
