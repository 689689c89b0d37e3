"""Grid-forming inverter simulation and sliding-mode current-gain tuning."""

from gfmi._core import (
    CampaignResult,
    CostResult,
    Event,
    EventKind,
    GaConfig,
    LinearLoadParams,
    OptimizationReport,
    OptimizerSettings,
    PsoConfig,
    SaConfig,
    Scenario,
    SearchSpace,
    SmcGains,
    TraceRow,
    campaign,
    clarke,
    convergence_iteration,
    default_scenario,
    inverse_clarke,
    inverse_park,
    median_convergence_iteration,
    minimize,
    park,
    simulate,
    tune,
)

__all__ = [
    "CampaignResult",
    "CostResult",
    "Event",
    "EventKind",
    "GaConfig",
    "LinearLoadParams",
    "OptimizationReport",
    "OptimizerSettings",
    "PsoConfig",
    "SaConfig",
    "Scenario",
    "SearchSpace",
    "SmcGains",
    "TraceRow",
    "campaign",
    "clarke",
    "convergence_iteration",
    "default_scenario",
    "inverse_clarke",
    "inverse_park",
    "median_convergence_iteration",
    "minimize",
    "park",
    "simulate",
    "tune",
]
