"""Design toolkit for exposure studies that combine direct (biomarker) and
indirect (self-report) measurements: closed-form variance and power for the
dual-instrument measurement-error model, exact integer design optimization
under a budget, minimum-budget search for a power target, pilot-data
estimation, Monte Carlo validation, and sensitivity analysis."""

from .types import (
    CalibDesignError,
    ConstraintError,
    ConvergenceError,
    CostModel,
    DegenerateDataError,
    Design,
    DomainError,
    InsufficientDataError,
    ModelParams,
    PowerSpec,
    SmallSubsampleWarning,
    TruncatedVarianceWarning,
    TwoGroupDesign,
)
from .formulas import (
    budget_exhausted_variance,
    full_sampling_variance,
    mean_estimator_variance,
    power_from_se,
    se_target,
)
from .optimizer import (
    BudgetIteration,
    BudgetSearchResult,
    DesignReport,
    OptimizerConfig,
    initial_budget,
    minimize_budget,
    optimal_replicates,
    optimize_single_group,
    optimize_two_groups,
)
from .estimation import (
    GroupData,
    MuEstimate,
    ParamEstimates,
    PilotDataset,
    estimate_model_params,
    mle_mean,
    read_pilot_csv,
    write_pilot_csv,
)
from .simulation import (
    MonteCarloPower,
    MonteCarloSE,
    SimSpec,
    TwoGroupSimSpec,
    monte_carlo_power,
    monte_carlo_se,
    simulate_dataset,
)
from .sweeps import (
    SensitivityRow,
    SurfaceRow,
    SweepGrid,
    ThresholdRow,
    efficiency,
    se_surface,
    sensitivity_scan,
    threshold_scan,
)
from .fixtures import CASE_STUDIES, HOVELL, TONE, WILSON, CaseStudy

__version__ = "0.1.0"

__all__ = [
    "CalibDesignError", "ConstraintError", "ConvergenceError", "CostModel",
    "DegenerateDataError", "Design", "DomainError", "InsufficientDataError",
    "ModelParams", "PowerSpec", "SmallSubsampleWarning",
    "TruncatedVarianceWarning", "TwoGroupDesign",
    "budget_exhausted_variance", "full_sampling_variance",
    "mean_estimator_variance", "power_from_se", "se_target",
    "BudgetIteration", "BudgetSearchResult", "DesignReport", "OptimizerConfig",
    "initial_budget", "minimize_budget", "optimal_replicates",
    "optimize_single_group", "optimize_two_groups",
    "GroupData", "MuEstimate", "ParamEstimates", "PilotDataset",
    "estimate_model_params", "mle_mean", "read_pilot_csv", "write_pilot_csv",
    "MonteCarloPower", "MonteCarloSE", "SimSpec", "TwoGroupSimSpec",
    "monte_carlo_power", "monte_carlo_se", "simulate_dataset",
    "SensitivityRow", "SurfaceRow", "SweepGrid", "ThresholdRow",
    "efficiency", "se_surface", "sensitivity_scan", "threshold_scan",
    "CASE_STUDIES", "HOVELL", "TONE", "WILSON", "CaseStudy",
    "__version__",
]
