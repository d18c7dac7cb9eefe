"""Exact and asymptotic enumeration of dense 0-1 matrices with given line sums.

Equivalently: bipartite graphs and digraphs with specified degrees, optionally
avoiding, containing or inducing a fixed pattern.
"""
from .instances import (
    ApplicabilityReport,
    BipartiteInstance,
    DigraphInstance,
    InducedStats,
    InstanceError,
    StatsBundle,
    check_applicability,
    check_applicability_digraph,
    compute_stats,
    digraph_stats,
    digraph_to_bipartite,
    induced_stats,
    induced_stats_digraph,
)
from .exact import (
    EmptyClassError,
    ExactProbability,
    ResourceLimitError,
    aut_count,
    aut_count_digraph,
    count_exact,
    count_exact_digraph,
    enumerate_members,
    expected_permanent_exact,
    permanent_exact,
    prob_exact,
)
from .saddle import (
    SaddleBoundaryError,
    SaddleDivergenceError,
    SaddleError,
    SaddlePoint,
    SaddleResiduals,
    saddle_from_offsets,
    saddle_residuals,
    solve_saddle,
)
from .asymptotics import (
    AveragingResult,
    EstimateError,
    LogEstimate,
    PermanentBounds,
    averaging_normalize,
    estimate_log_count_bipartite,
    estimate_log_count_digraph,
    expected_isomorph_count,
    expected_permanent_estimate,
    induced_prob,
    log_prob_miss_hit,
    log_prob_miss_hit_digraph,
    miss_hit_factor,
    permanent_bounds,
)
from .harness import ComparisonRow, SweepConfig, generate_instance, run_compare_sweep

__version__ = "0.1.0"
