"""Re-notification planning: critical repeats until acknowledged, normal
notifies once, info is listed silently."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ValidationError
from .groups import AlarmGroup

IMPORTANCES = ("critical", "normal", "info")


@dataclass(frozen=True)
class RepetitionPolicy:
    importance: str
    schedule: tuple[float, ...] = ()   # re-notify offsets in seconds after t0
    max_repeats: int = 10

    def validate(self) -> None:
        if self.importance not in IMPORTANCES:
            raise ValidationError(f"unknown importance {self.importance!r}")
        if any(b <= a for a, b in zip(self.schedule, self.schedule[1:])):
            raise ValidationError("schedule offsets must be strictly increasing")
        if any(offset <= 0 for offset in self.schedule):
            raise ValidationError("schedule offsets must be > 0")
        if self.importance == "info" and self.schedule:
            raise ValidationError("info policy must have an empty schedule")
        if self.max_repeats < 0:
            raise ValidationError("max_repeats must be >= 0")


DEFAULT_POLICIES = {
    "critical": RepetitionPolicy("critical", schedule=(300.0, 900.0), max_repeats=10),
    "normal": RepetitionPolicy("normal"),
    "info": RepetitionPolicy("info"),
}


@dataclass
class NotificationPlan:
    """Scheduled pushes for one group; silent groups get a list entry only."""

    group_id: str
    importance: str
    notify_at: list[int]           # ms timestamps, first entry is the initial push
    listed: bool = True
    acknowledged_at: int | None = None

    def acknowledge(self, at_ms: int) -> None:
        if self.acknowledged_at is None or at_ms < self.acknowledged_at:
            self.acknowledged_at = at_ms

    def due(self) -> list[int]:
        """Notification times that actually fire, honoring acknowledgment."""
        if self.acknowledged_at is None:
            return list(self.notify_at)
        return [t for t in self.notify_at if t <= self.acknowledged_at]

    def to_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "importance": self.importance,
            "notify_at": list(self.notify_at),
            "listed": self.listed,
            "acknowledged_at": self.acknowledged_at,
        }


def schedule_repetition(group: AlarmGroup, policy: RepetitionPolicy) -> NotificationPlan:
    policy.validate()
    t0 = group.first_ts
    if policy.importance == "info":
        return NotificationPlan(group_id=group.group_id, importance="info",
                                notify_at=[], listed=True)
    if policy.importance == "normal":
        return NotificationPlan(group_id=group.group_id, importance="normal",
                                notify_at=[t0])
    offsets = policy.schedule[:policy.max_repeats]
    notify_at = [t0] + [t0 + int(offset * 1000) for offset in offsets]
    return NotificationPlan(group_id=group.group_id, importance="critical",
                            notify_at=notify_at)
