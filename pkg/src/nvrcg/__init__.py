"""Nonlinear conjugate gradient methods for vector optimization on manifolds."""

__version__ = "0.1.0"

from .cones import ConeSpec, cone_from_spec, is_K_descent, leq_K, phi, phi_batch
from .manifolds import (
    DegenerateRetractionError,
    Euclidean,
    ManifoldPoint,
    Sphere,
    TangentVector,
    inner,
    manifold_from_name,
    norm,
    project_tangent,
    retract,
    transport_diff_retraction,
)
from .objectives import (
    QuadLinearObjective,
    QuadQuadObjective,
    VectorObjective,
    problem_from_spec,
    quad_quad_random,
)
from .subproblem import (
    SteepestDescentResult,
    SubproblemError,
    brute_force_direction,
    direction_value,
    steepest_direction,
)
from .linesearch import (
    InvalidDirectionError,
    LineSearchOutcome,
    WolfeParams,
    check_armijo,
    check_curvature,
    psi,
    wolfe_search,
)
from .solver import (
    BetaKind,
    DegenerateBetaError,
    DescentAssertionError,
    IterationRecord,
    RunReport,
    SearchState,
    compute_beta,
    descent_interval_check,
    nvrcg_run,
    parse_beta_kind,
    zoutendijk_monitor,
)
from .bench import (
    AggregateRow,
    ExperimentConfig,
    emit_table,
    export_pareto_cloud,
    run_batch,
    run_experiment,
    write_experiment,
)

__all__ = [
    "__version__",
    "ConeSpec",
    "cone_from_spec",
    "phi",
    "phi_batch",
    "leq_K",
    "is_K_descent",
    "Sphere",
    "Euclidean",
    "ManifoldPoint",
    "TangentVector",
    "DegenerateRetractionError",
    "inner",
    "norm",
    "project_tangent",
    "retract",
    "transport_diff_retraction",
    "manifold_from_name",
    "VectorObjective",
    "QuadLinearObjective",
    "QuadQuadObjective",
    "quad_quad_random",
    "problem_from_spec",
    "SteepestDescentResult",
    "SubproblemError",
    "steepest_direction",
    "brute_force_direction",
    "direction_value",
    "WolfeParams",
    "LineSearchOutcome",
    "InvalidDirectionError",
    "psi",
    "check_armijo",
    "check_curvature",
    "wolfe_search",
    "BetaKind",
    "parse_beta_kind",
    "SearchState",
    "IterationRecord",
    "RunReport",
    "DegenerateBetaError",
    "DescentAssertionError",
    "compute_beta",
    "descent_interval_check",
    "nvrcg_run",
    "zoutendijk_monitor",
    "ExperimentConfig",
    "AggregateRow",
    "run_batch",
    "run_experiment",
    "write_experiment",
    "emit_table",
    "export_pareto_cloud",
]
