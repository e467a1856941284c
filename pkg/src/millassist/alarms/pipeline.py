"""The composed flood filter: chatter suppression, then sequence grouping,
then knowledge linkage and notification planning.

Stages hand timestamp-ordered units to each other; every raised alarm id
leaves the pipeline in exactly one presentation unit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..records import AlarmEvent
from .groups import AlarmGroup, ChatterSuppressor, GroupIds
from .linking import AnnotatedGroup, knowledge_link_filter
from .matching import PatternMatcher
from .metrics import FloodMetrics, flood_metrics
from .mining import AlarmPattern
from .repetition import DEFAULT_POLICIES, NotificationPlan, RepetitionPolicy, \
    schedule_repetition


@dataclass
class PresentationUnit:
    """What the operator board renders: an annotated group plus its plan."""

    annotated: AnnotatedGroup
    plan: NotificationPlan

    @property
    def group(self) -> AlarmGroup:
        return self.annotated.group

    def to_dict(self) -> dict:
        d = self.annotated.to_dict()
        d["plan"] = self.plan.to_dict()
        return d


class AlarmPipeline:
    def __init__(self, window_s: float = 60.0,
                 patterns: list[AlarmPattern] | None = None,
                 knowledge_base=None,
                 policies: dict[str, RepetitionPolicy] | None = None):
        self.ids = GroupIds()
        self.chatter = ChatterSuppressor(window_s, self.ids)
        self.matcher = PatternMatcher(patterns or [], self.ids)
        self.knowledge_base = knowledge_base
        self.policies = policies or dict(DEFAULT_POLICIES)
        self.units: list[PresentationUnit] = []
        self._raw_count = 0
        self._t_min: int | None = None
        self._t_max: int | None = None

    def feed(self, alarm: AlarmEvent) -> list[PresentationUnit]:
        """Consume one alarm event; cleared events only update time bounds."""
        if alarm.state != "raised":
            return []
        self._raw_count += 1
        self._t_min = alarm.timestamp if self._t_min is None \
            else min(self._t_min, alarm.timestamp)
        self._t_max = alarm.timestamp if self._t_max is None \
            else max(self._t_max, alarm.timestamp)
        out: list[PresentationUnit] = []
        for group in self.chatter.feed(alarm):
            out.extend(self._after_chatter(group))
        return out

    def _after_chatter(self, group: AlarmGroup) -> list[PresentationUnit]:
        if group.kind == "chatter":
            return [self._present(group)]
        # Singletons may still belong to a cascade; run them through the matcher.
        [alarm] = group.alarms
        return [self._present(g) for g in self.matcher.feed(alarm)]

    def _present(self, group: AlarmGroup) -> PresentationUnit:
        annotated = knowledge_link_filter(group, self.knowledge_base)
        policy = self.policies[annotated.importance]
        unit = PresentationUnit(annotated=annotated,
                                plan=schedule_repetition(group, policy))
        self.units.append(unit)
        return unit

    def flush(self) -> list[PresentationUnit]:
        """Close all pending state at end of stream."""
        out: list[PresentationUnit] = []
        for group in self.chatter.flush():
            out.extend(self._after_chatter(group))
        out.extend(self._present(g) for g in self.matcher.flush())
        return out

    def acknowledge(self, group_id: str, at_ms: int) -> bool:
        for unit in self.units:
            if unit.group.group_id == group_id:
                unit.plan.acknowledge(at_ms)
                return True
        return False

    def metrics(self) -> FloodMetrics:
        window_ms = 0 if self._t_min is None else self._t_max - self._t_min
        groups_formed = sum(1 for u in self.units if u.group.count > 1)
        return flood_metrics(self._raw_count, len(self.units), groups_formed,
                             window_ms)


def run_pipeline(stream: list[AlarmEvent], **kwargs) -> AlarmPipeline:
    """Feed a whole stream and flush; returns the pipeline for inspection."""
    pipeline = AlarmPipeline(**kwargs)
    for alarm in stream:
        pipeline.feed(alarm)
    pipeline.flush()
    return pipeline
