"""Parallel densest-subgraph peeling with long-tail pruning."""
from .cliques import CliqueCounts, cliques_containing, count_cliques
from .engine import (
    DriftError,
    MetricPreconditionError,
    PeelConfig,
    PeelResult,
    RoundRecord,
    peel,
    peel_gpo,
    peel_lpo,
    peel_parallel,
    peel_sequential,
)
from .graph import (
    AliveSet,
    Edge,
    EdgeRecord,
    Graph,
    GraphFormatError,
    induced_total_weight,
    load_edge_list,
    load_vertex_weights,
    set_vertex_weights,
    validate_metric_preconditions,
)
from .metrics import (
    MetricSpec,
    custom_metric,
    fd_edge_suspiciousness,
    initial_peeling_weights,
    resolve_metric,
)
from .oracle import OracleResult, check_guarantee, exact_densest, reference_peel

__version__ = "0.1.0"
