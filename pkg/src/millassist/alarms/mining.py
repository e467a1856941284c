"""Frequent alarm-sequence mining over historical streams.

A pattern is a contiguous run of raised-alarm error codes whose consecutive
inter-arrival times stay within max_gap_s. Runs with a code repeated
back-to-back are chatter, not sequence structure, so enumeration stops there.
Returned patterns are support-filtered and prefix-maximal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO

from ..errors import OrderingError, ValidationError
from ..records import AlarmEvent


@dataclass(frozen=True)
class AlarmPattern:
    sequence: tuple[str, ...]
    support: int
    max_gap_s: float

    def validate(self) -> None:
        if len(self.sequence) < 2:
            raise ValidationError("pattern needs at least 2 codes")
        if any(a == b for a, b in zip(self.sequence, self.sequence[1:])):
            raise ValidationError("pattern repeats a code consecutively")
        if self.support < 1:
            raise ValidationError("support must be >= 1")


def mine_sequences(history: list[AlarmEvent], min_support: int,
                   max_gap_s: float, max_len: int = 4) -> list[AlarmPattern]:
    """All prefix-maximal gap-bounded code n-grams with support >= min_support.

    Sorted by (support descending, sequence) for stable output.
    """
    if min_support < 1:
        raise ValidationError("min_support must be >= 1")
    if max_len < 2:
        raise ValidationError("max_len must be >= 2")
    raised = [a for a in history if a.state == "raised"]
    times = [a.timestamp for a in raised]
    if times != sorted(times):
        raise OrderingError("history must be timestamp-ordered")

    max_gap_ms = int(max_gap_s * 1000)
    counts: dict[tuple[str, ...], int] = {}
    for i in range(len(raised)):
        codes = [raised[i].error_code]
        j = i
        while j + 1 < len(raised) and len(codes) < max_len:
            nxt = raised[j + 1]
            if nxt.timestamp - raised[j].timestamp > max_gap_ms:
                break
            if nxt.error_code == codes[-1]:
                break
            codes.append(nxt.error_code)
            key = tuple(codes)
            counts[key] = counts.get(key, 0) + 1
            j += 1

    frequent = {seq: n for seq, n in counts.items() if n >= min_support}
    maximal = []
    for seq, support in frequent.items():
        extended = any(longer[:len(seq)] == seq and frequent[longer] == support
                       for longer in frequent
                       if len(longer) == len(seq) + 1)
        if not extended:
            maximal.append(AlarmPattern(sequence=seq, support=support,
                                        max_gap_s=max_gap_s))
    maximal.sort(key=lambda p: (-p.support, p.sequence))
    return maximal


def write_patterns(patterns: list[AlarmPattern], fp: IO[str]) -> int:
    for p in patterns:
        p.validate()
        fp.write(json.dumps({"sequence": list(p.sequence), "support": p.support,
                             "max_gap_s": p.max_gap_s},
                            sort_keys=True, separators=(",", ":")) + "\n")
    return len(patterns)


def read_patterns(fp: IO[str]) -> list[AlarmPattern]:
    patterns = []
    for line in fp:
        line = line.strip()
        if not line:
            continue
        doc = json.loads(line)
        pattern = AlarmPattern(sequence=tuple(doc["sequence"]),
                               support=int(doc["support"]),
                               max_gap_s=float(doc["max_gap_s"]))
        pattern.validate()
        patterns.append(pattern)
    return patterns
