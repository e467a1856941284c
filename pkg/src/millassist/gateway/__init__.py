from .http import SCHEMA_VERSION, create_app
from .platform import (FAR_FUTURE, Platform, TrainedParameter,
                       feature_spec_for)
from .report import render_report

__all__ = [
    "FAR_FUTURE",
    "Platform",
    "SCHEMA_VERSION",
    "TrainedParameter",
    "create_app",
    "feature_spec_for",
    "render_report",
]
