"""Firefly-algorithm optimization toolkit.

Base algorithm and its published variant mechanisms as composable
strategies, a benchmark registry including a dynamic moving-peaks
landscape, and a seeded experiment harness with machine-readable output.
"""

from .benchmarks import (
    FOUR_PEAKS_MINIMA,
    MovingPeaks,
    benchmark_names,
    lookup,
    make_moving_peaks,
)
from .core import (
    EvaluationError,
    FaParams,
    Firefly,
    Objective,
    RunReport,
    SwarmState,
    attractiveness,
    distance,
    evaluate,
    find_best,
    fitness_to_intensity,
    initialize,
    intensity_at,
    move_firefly,
    order,
    pairwise_sweep,
    run,
    step,
)
from .harness import (
    ExperimentConfig,
    SummaryStats,
    compare_variants,
    emit_results,
    parse_config,
    run_experiment,
    run_multiswarm,
    run_single,
)
from .randomization import (
    ChaoticStream,
    ScheduleDescriptor,
    alpha_at,
    chaotic_param_stream,
    gaussian_step,
    levy_step,
    logistic_next,
    mantegna_sigma,
    uniform_centered_step,
)
from .variants import (
    MultiSwarmConfig,
    PenaltySpec,
    SentinelSet,
    elitist_best_move,
    global_best_pull_step,
    initialize_multiswarm,
    make_sentinels,
    multiswarm_step,
    penalty_wrap,
    reduction_mode,
)

__version__ = "0.1.0"

__all__ = [
    "ChaoticStream",
    "EvaluationError",
    "ExperimentConfig",
    "FOUR_PEAKS_MINIMA",
    "FaParams",
    "Firefly",
    "MovingPeaks",
    "MultiSwarmConfig",
    "Objective",
    "PenaltySpec",
    "RunReport",
    "ScheduleDescriptor",
    "SentinelSet",
    "SummaryStats",
    "SwarmState",
    "alpha_at",
    "attractiveness",
    "benchmark_names",
    "chaotic_param_stream",
    "compare_variants",
    "distance",
    "elitist_best_move",
    "emit_results",
    "evaluate",
    "find_best",
    "fitness_to_intensity",
    "gaussian_step",
    "global_best_pull_step",
    "initialize",
    "initialize_multiswarm",
    "intensity_at",
    "levy_step",
    "logistic_next",
    "lookup",
    "make_moving_peaks",
    "make_sentinels",
    "mantegna_sigma",
    "move_firefly",
    "multiswarm_step",
    "order",
    "pairwise_sweep",
    "parse_config",
    "penalty_wrap",
    "reduction_mode",
    "run",
    "run_experiment",
    "run_multiswarm",
    "run_single",
    "step",
    "uniform_centered_step",
]
