"""Time-aware causal recourse toolkit: linear additive-noise SCMs,
graph response-time costs, and minimal-cost recourse search, with a
loan-approval benchmark, a CLI, and an HTTP service."""

from .scm import (
    Action,
    Dataset,
    NoiseSpec,
    Prediction,
    Scm,
    StructuralEquation,
    TargetSpec,
    ValidationError,
    ValidationReport,
    Variable,
    VariancePair,
    abduct,
    counterfactual,
    dump_scm_file,
    hard_intervene,
    intervene,
    load_scm_file,
    predict,
    sample,
    sample_unfavorable,
    validate,
    variances,
)
from .graph import (
    CancellingWeightsError,
    CausalDag,
    Edge,
    GraphError,
    PathCountError,
    PathRecord,
    count_paths,
    enumerate_paths,
    expected_response_time,
    from_scm,
    has_path,
    longest_path_time,
    path_weight_sums,
    total_causal_effect,
)
from .cost import CostBreakdown, CostError, CostSpec, feature_cost, time_cost, total_cost
from .recourse import (
    FrontierPoint,
    RecourseProblem,
    RecourseSolution,
    brute_force_solve,
    evaluate_action,
    lambda_frontier,
    solve,
    support_switches,
)
from .bench import (
    CedEstimate,
    CedReport,
    CedRow,
    ced,
    ced_table,
    german_dag,
    german_scm,
    german_times,
    pairplot_export,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "CancellingWeightsError",
    "CausalDag",
    "CedEstimate",
    "CedReport",
    "CedRow",
    "CostBreakdown",
    "CostError",
    "CostSpec",
    "Dataset",
    "Edge",
    "FrontierPoint",
    "GraphError",
    "NoiseSpec",
    "PathCountError",
    "PathRecord",
    "Prediction",
    "RecourseProblem",
    "RecourseSolution",
    "Scm",
    "StructuralEquation",
    "TargetSpec",
    "ValidationError",
    "ValidationReport",
    "Variable",
    "VariancePair",
    "abduct",
    "brute_force_solve",
    "ced",
    "ced_table",
    "count_paths",
    "counterfactual",
    "dump_scm_file",
    "enumerate_paths",
    "evaluate_action",
    "expected_response_time",
    "feature_cost",
    "from_scm",
    "german_dag",
    "german_scm",
    "german_times",
    "hard_intervene",
    "has_path",
    "intervene",
    "lambda_frontier",
    "load_scm_file",
    "longest_path_time",
    "pairplot_export",
    "path_weight_sums",
    "predict",
    "sample",
    "sample_unfavorable",
    "solve",
    "support_switches",
    "time_cost",
    "total_cost",
    "total_causal_effect",
    "validate",
    "variances",
]
