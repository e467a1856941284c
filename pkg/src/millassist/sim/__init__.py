"""Seeded synthetic paper-mill scenario generator with known ground truth."""

from .config import (
    CascadeAlarm,
    FaultInjection,
    LabPlanRule,
    QualitySpec,
    ScenarioConfig,
    SensorSpec,
    default_config,
    load_config,
    save_config,
)
from .generator import (
    EmissionBatch,
    FaultWindow,
    GroundTruth,
    PlanStepper,
    ScenarioPlan,
    build_scenario,
    true_quality,
    write_plan_log,
)

__all__ = [
    "CascadeAlarm",
    "EmissionBatch",
    "FaultInjection",
    "FaultWindow",
    "GroundTruth",
    "LabPlanRule",
    "PlanStepper",
    "QualitySpec",
    "ScenarioConfig",
    "ScenarioPlan",
    "SensorSpec",
    "build_scenario",
    "default_config",
    "load_config",
    "save_config",
    "true_quality",
    "write_plan_log",
]
