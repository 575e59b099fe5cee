"""Random piecewise-affine interval systems: parameter regions, seeded Monte
Carlo for stationary measures and Lyapunov exponents, dimension bounds, and
stopping-time/return-time experiments."""

from .core import (
    AMParams,
    AMSystem,
    Branch,
    IntervalPartition,
    ProbVector,
    apply_inverse,
    apply_map,
    is_disjoint_type,
    log_derivative,
    lr_gamma_threshold,
    lr_separated,
    new_system,
)
from .engine import HybridPoint, RngStream, SymbolStream, next_symbol, run_orbit, step
from .kernels import BACKEND, available_backends
from .measure import (
    EmpiricalMeasure,
    EstimateWithError,
    InconclusiveError,
    OrbitEstimate,
    dimension_bound_entropy_lyap,
    estimate_measure,
    kac_mean_return,
    lyapunov_exponent,
    lyapunov_upper_bound,
    mass_fraction,
    mu_M_lower_bound,
    resonant_dimension,
    stationarity_residual,
)
from .region import (
    ExponentPair,
    PreconditionError,
    RegionVerdict,
    a_max_dim,
    a_max_lr,
    contraction_condition,
    critical_p,
    dimension_bound_closed_form,
    dimension_bound_half,
    endpoint_exponents,
    gamma_interval,
    rasterize_region,
    region_verdict,
)
from .walks import (
    ExactWalkStats,
    ReturnOutcome,
    WalkOutcome,
    WalkSummary,
    esn_sweep,
    exact_walk_stats,
    hoeffding_tail,
    kac_residual,
    mu_M_walk_bound,
    sample_return_time,
    sample_walk,
    uniform_gamma_grid,
    wald_check,
    wald_residual,
    walk_summary,
)

__version__ = "0.1.0"
