"""Alarm flood filtering: chatter collapse, sequence mining and grouping,
knowledge linkage, repetition policy, and flood metrics."""

from .groups import AlarmGroup, ChatterSuppressor, GroupIds, suppress_chatter
from .linking import (
    IMPORTANCE_BY_SEVERITY,
    STATUS_HOLD,
    STATUS_PASS,
    STATUS_UNFILTERED,
    AnnotatedGroup,
    knowledge_link_filter,
)
from .matching import PatternMatcher, group_by_pattern
from .metrics import FloodMetrics, flood_metrics
from .mining import AlarmPattern, mine_sequences, read_patterns, write_patterns
from .pipeline import AlarmPipeline, PresentationUnit, run_pipeline
from .repetition import (
    DEFAULT_POLICIES,
    NotificationPlan,
    RepetitionPolicy,
    schedule_repetition,
)

__all__ = [
    "AlarmGroup",
    "AlarmPattern",
    "AlarmPipeline",
    "AnnotatedGroup",
    "ChatterSuppressor",
    "DEFAULT_POLICIES",
    "FloodMetrics",
    "GroupIds",
    "IMPORTANCE_BY_SEVERITY",
    "NotificationPlan",
    "PatternMatcher",
    "PresentationUnit",
    "RepetitionPolicy",
    "STATUS_HOLD",
    "STATUS_PASS",
    "STATUS_UNFILTERED",
    "flood_metrics",
    "group_by_pattern",
    "knowledge_link_filter",
    "mine_sequences",
    "read_patterns",
    "run_pipeline",
    "schedule_repetition",
    "suppress_chatter",
    "write_patterns",
]
