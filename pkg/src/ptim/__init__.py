"""Threshold-diffusion engine, CELF seed selection, property oracles, and
an experiment harness, exposed as a library, a CLI, and a FastAPI service.
"""

from .diffusion import (
    AmplifiedEdge,
    DiffusionOutcome,
    ModelSpec,
    SpreadEstimate,
    ThresholdAssignment,
    estimate_spread,
    run_lt,
    run_model,
    run_pt,
    sample_thresholds,
)
from .errors import (
    DatasetUnavailableError,
    GraphParseError,
    PtimError,
    ValidationError,
)
from .graph import (
    DirectedGraph,
    EdgeWeightMap,
    GraphFormat,
    GraphSource,
    explicit_weights,
    export_edge_list,
    generate_erdos_renyi,
    load_edge_list,
    weighted_cascade,
)
from .influence import CelfResult, EstimatorConfig, celf, greedy_naive
from .properties import (
    CounterexampleFixture,
    PropertyReport,
    check_alpha_zero_equivalence,
    check_lt_dominated_by_pt,
    check_monotonicity,
    check_weight_cap,
    counterexample_fixture,
    reference_spread,
    run_all_checks,
    verify_counterexample,
)

__version__ = "0.1.0"

__all__ = [
    "AmplifiedEdge",
    "CelfResult",
    "CounterexampleFixture",
    "DatasetUnavailableError",
    "DiffusionOutcome",
    "DirectedGraph",
    "EdgeWeightMap",
    "EstimatorConfig",
    "GraphFormat",
    "GraphParseError",
    "GraphSource",
    "ModelSpec",
    "PropertyReport",
    "PtimError",
    "SpreadEstimate",
    "ThresholdAssignment",
    "ValidationError",
    "celf",
    "check_alpha_zero_equivalence",
    "check_lt_dominated_by_pt",
    "check_monotonicity",
    "check_weight_cap",
    "counterexample_fixture",
    "estimate_spread",
    "explicit_weights",
    "export_edge_list",
    "generate_erdos_renyi",
    "greedy_naive",
    "load_edge_list",
    "reference_spread",
    "run_all_checks",
    "run_lt",
    "run_model",
    "run_pt",
    "sample_thresholds",
    "verify_counterexample",
    "weighted_cascade",
]
