"""Online grouping of live alarm streams against mined sequence patterns.

Each incoming alarm either extends an active partial match, starts a new one,
or passes through as a singleton. Longest match wins: a completed prefix is
held until the pattern can no longer grow (leaf reached, or the gap budget
expires), then emitted as one sequence group whose representative is the
FIRST alarm of the match. Alarms captured past the last completed prefix are
re-fed, so nothing is ever lost or duplicated.
"""

from __future__ import annotations

from ..records import AlarmEvent
from .groups import AlarmGroup, GroupIds, make_group
from .mining import AlarmPattern


class _TrieNode:
    __slots__ = ("children", "terminal", "gap_ms")

    def __init__(self):
        self.children: dict[str, _TrieNode] = {}
        self.terminal = False
        self.gap_ms = 0   # widest gap budget among patterns through this node


class _Walker:
    __slots__ = ("node", "alarms", "best_len")

    def __init__(self, node: _TrieNode, alarm: AlarmEvent):
        self.node = node
        self.alarms = [alarm]
        self.best_len = 1 if node.terminal else 0   # longest completed prefix


class PatternMatcher:
    """Feed raised alarms in timestamp order; collect groups as they close."""

    def __init__(self, patterns: list[AlarmPattern], ids: GroupIds | None = None):
        self.ids = ids or GroupIds()
        self._root = _TrieNode()
        for pattern in patterns:
            pattern.validate()
            node = self._root
            gap_ms = int(pattern.max_gap_s * 1000)
            node.gap_ms = max(node.gap_ms, gap_ms)
            for code in pattern.sequence:
                node = node.children.setdefault(code, _TrieNode())
                node.gap_ms = max(node.gap_ms, gap_ms)
            node.terminal = True
        self._walkers: list[_Walker] = []

    def feed(self, alarm: AlarmEvent) -> list[AlarmGroup]:
        if alarm.state != "raised":
            return []
        out = self._expire(alarm.timestamp)
        out.extend(self._place(alarm))
        return out

    def _place(self, alarm: AlarmEvent) -> list[AlarmGroup]:
        code = alarm.error_code
        for walker in self._walkers:
            child = walker.node.children.get(code)
            if child is None:
                continue
            if alarm.timestamp - walker.alarms[-1].timestamp > walker.node.gap_ms:
                continue
            walker.node = child
            walker.alarms.append(alarm)
            if child.terminal:
                walker.best_len = len(walker.alarms)
            if not child.children:
                self._walkers.remove(walker)
                return [make_group("sequence", walker.alarms, self.ids)]
            return []
        if code in self._root.children:
            self._walkers.append(_Walker(self._root.children[code], alarm))
            return []
        return [make_group("singleton", [alarm], self.ids)]

    def _expire(self, now: int) -> list[AlarmGroup]:
        # Settling can re-feed leftover alarms that immediately expire again,
        # so drain one walker at a time until none is past its gap budget.
        out: list[AlarmGroup] = []
        while True:
            stale = next((w for w in self._walkers
                          if now - w.alarms[-1].timestamp > w.node.gap_ms), None)
            if stale is None:
                return out
            self._walkers.remove(stale)
            out.extend(self._settle(stale))

    def _settle(self, walker: _Walker) -> list[AlarmGroup]:
        """Emit the walker's longest completed prefix; re-feed the leftovers."""
        out: list[AlarmGroup] = []
        if walker.best_len >= 2:
            out.append(make_group("sequence", walker.alarms[:walker.best_len], self.ids))
            tail = walker.alarms[walker.best_len:]
        else:
            # no completed prefix (patterns are length >= 2, so best_len is 0)
            out.append(make_group("singleton", walker.alarms[:1], self.ids))
            tail = walker.alarms[1:]
        for leftover in tail:
            out.extend(self._place(leftover))
        return out

    def flush(self) -> list[AlarmGroup]:
        """Close every partial match; call at end of stream."""
        out: list[AlarmGroup] = []
        while self._walkers:
            walker = self._walkers.pop(0)
            out.extend(self._settle(walker))
        return out


def group_by_pattern(stream: list[AlarmEvent], patterns: list[AlarmPattern],
                     ids: GroupIds | None = None) -> list[AlarmGroup]:
    """Offline convenience wrapper; groups ordered by first timestamp."""
    matcher = PatternMatcher(patterns, ids)
    groups: list[AlarmGroup] = []
    for alarm in stream:
        groups.extend(matcher.feed(alarm))
    groups.extend(matcher.flush())
    groups.sort(key=lambda g: g.first_ts)
    return groups
