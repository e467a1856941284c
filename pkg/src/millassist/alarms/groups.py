"""Alarm presentation units and online chatter suppression."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ValidationError
from ..records import AlarmEvent

GROUP_KINDS = ("chatter", "sequence", "singleton")


class GroupIds:
    """Counter-based group id source, shared across pipeline stages."""

    def __init__(self, prefix: str = "grp"):
        self.prefix = prefix
        self._next = 0

    def take(self) -> str:
        self._next += 1
        return f"{self.prefix}-{self._next:06d}"


@dataclass
class AlarmGroup:
    """One presentation unit: a chatter run, a matched sequence, or a singleton."""

    group_id: str
    kind: str
    representative: AlarmEvent
    members: list[str]
    first_ts: int
    last_ts: int
    alarms: list[AlarmEvent] = field(default_factory=list, repr=False)

    @property
    def count(self) -> int:
        return len(self.members)

    def validate(self) -> None:
        if self.kind not in GROUP_KINDS:
            raise ValidationError(f"unknown group kind {self.kind!r}")
        if not self.members:
            raise ValidationError("group needs at least one member")
        if self.alarms:
            times = [a.timestamp for a in self.alarms]
            if times != sorted(times):
                raise ValidationError("group members must be timestamp-ordered")
            if self.kind == "chatter":
                keys = {(a.tag, a.error_code) for a in self.alarms}
                if len(keys) != 1:
                    raise ValidationError("chatter group mixes (tag, error_code) keys")

    def to_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "kind": self.kind,
            "representative": {
                "alarm_id": self.representative.alarm_id,
                "tag": self.representative.tag,
                "error_code": self.representative.error_code,
                "severity": self.representative.severity,
                "timestamp": self.representative.timestamp,
            },
            "members": list(self.members),
            "count": self.count,
            "first_ts": self.first_ts,
            "last_ts": self.last_ts,
        }


def make_group(kind: str, alarms: list[AlarmEvent], ids: GroupIds) -> AlarmGroup:
    group = AlarmGroup(
        group_id=ids.take(),
        kind=kind,
        representative=alarms[0],
        members=[a.alarm_id for a in alarms],
        first_ts=alarms[0].timestamp,
        last_ts=alarms[-1].timestamp,
        alarms=list(alarms),
    )
    group.validate()
    return group


class ChatterSuppressor:
    """Collapses runs of one (tag, error_code) raised within window_s of each
    other into a single chatter group; isolated alarms come out as singleton
    markers for the next stage.

    Emission is deferred until a run can no longer grow (the window passed
    without a repeat), so output trails input by up to window_s.
    """

    def __init__(self, window_s: float, ids: GroupIds | None = None):
        # window 0 is legal and means no collapsing (identity on distinct times)
        if window_s < 0:
            raise ValidationError("chatter window must be >= 0 seconds")
        self.window_ms = int(window_s * 1000)
        self.ids = ids or GroupIds()
        self._open: dict[tuple[str, str], list[AlarmEvent]] = {}

    def feed(self, alarm: AlarmEvent) -> list[AlarmGroup]:
        """Consume one raised alarm; returns any groups that just closed."""
        if alarm.state != "raised":
            return []
        out = self._expire(alarm.timestamp)
        key = (alarm.tag, alarm.error_code)
        run = self._open.get(key)
        if run is not None and alarm.timestamp - run[-1].timestamp <= self.window_ms:
            run.append(alarm)
        else:
            if run is not None:
                out.append(self._close(key))
            self._open[key] = [alarm]
        return out

    def _expire(self, now: int) -> list[AlarmGroup]:
        closed = []
        for key in list(self._open):
            if now - self._open[key][-1].timestamp > self.window_ms:
                closed.append(self._close(key))
        closed.sort(key=lambda g: g.first_ts)
        return closed

    def _close(self, key: tuple[str, str]) -> AlarmGroup:
        run = self._open.pop(key)
        kind = "chatter" if len(run) > 1 else "singleton"
        return make_group(kind, run, self.ids)

    def flush(self) -> list[AlarmGroup]:
        """Close every open run; call at end of stream."""
        out = [self._close(key) for key in list(self._open)]
        out.sort(key=lambda g: g.first_ts)
        return out


def suppress_chatter(stream: list[AlarmEvent], window_s: float,
                     ids: GroupIds | None = None) -> list[AlarmGroup]:
    """Offline convenience wrapper; groups ordered by first timestamp."""
    suppressor = ChatterSuppressor(window_s, ids)
    groups: list[AlarmGroup] = []
    for alarm in stream:
        groups.extend(suppressor.feed(alarm))
    groups.extend(suppressor.flush())
    groups.sort(key=lambda g: g.first_ts)
    return groups
