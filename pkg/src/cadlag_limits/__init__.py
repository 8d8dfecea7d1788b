"""Skorohod M1 metrics on step paths and Monte Carlo checks of heavy-tailed limit theorems."""

__version__ = "0.1.0"

from .paths import (  # noqa: E402
    CompletedGraph,
    StepFunction,
    completed_graph,
    eval_path,
    left_limit,
    linear_combination,
    project,
    sup_norm,
)
from .metrics import (  # noqa: E402
    MetricResult,
    m1_distance,
    m1_oracle,
    strong_m1_lower_bound,
    uniform_distance,
    weak_m1_distance,
)
from .stable import StableLaw, levy_tail_to_stable, sample_stable  # noqa: E402
from .models import (  # noqa: E402
    ModelConfig,
    Sample,
    normalizing_an,
    sample_pareto,
    simulate,
    simulate_lagged,
    simulate_sre,
    stable_limit_params,
)
from .limits import (  # noqa: E402
    ClusterSample,
    EstimationError,
    PointMeasure,
    TailWindow,
    estimate_tail_process,
    estimate_theta_blocks,
    exceedance_process,
    extract_clusters,
    karamata_ratio,
    lambda_membership,
    nu_u_estimate,
    opposite_sign_check,
    partial_sum_process,
    psi_continuity_probe,
    small_jump_statistic,
    summation_functional,
    theta_from_spectral,
    truncated_partial_sum,
)
from .report import Report  # noqa: E402
from .experiments import ExperimentConfig, run_experiment  # noqa: E402

__all__ = [
    "CompletedGraph", "StepFunction", "completed_graph", "eval_path", "left_limit",
    "linear_combination", "project", "sup_norm",
    "MetricResult", "m1_distance", "m1_oracle", "strong_m1_lower_bound", "uniform_distance",
    "weak_m1_distance",
    "StableLaw", "levy_tail_to_stable", "sample_stable",
    "ModelConfig", "Sample", "normalizing_an", "sample_pareto", "simulate", "simulate_lagged",
    "simulate_sre", "stable_limit_params",
    "ClusterSample", "EstimationError", "PointMeasure", "TailWindow", "estimate_tail_process",
    "estimate_theta_blocks", "exceedance_process", "extract_clusters", "karamata_ratio",
    "lambda_membership", "nu_u_estimate", "opposite_sign_check", "partial_sum_process",
    "psi_continuity_probe", "small_jump_statistic", "summation_functional", "theta_from_spectral",
    "truncated_partial_sum",
    "Report", "ExperimentConfig", "run_experiment",
]
