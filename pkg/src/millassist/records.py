"""Wire format for mill records.

One JSON object per line, discriminated by the ``kind`` field. The same format
is produced by the scenario generator, ingested and re-exported by the event
store, so a log round-trips bit-exactly. Timestamps are integer milliseconds
since scenario start.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator, Union

from .errors import ValidationError

KIND_SENSOR = "sensor"
KIND_LAB = "lab"
KIND_ALARM = "alarm"
KIND_SORTING = "sorting"
KIND_REEL = "reel"

RECORD_KINDS = (KIND_ALARM, KIND_LAB, KIND_REEL, KIND_SENSOR, KIND_SORTING)

SEVERITIES = ("info", "warning", "alarm")
ALARM_STATES = ("raised", "cleared")
QUALITY_FLAGS = ("good", "suspect")

RATIO_SUM_TOL = 1e-9


@dataclass(frozen=True)
class SensorReading:
    tag: str
    timestamp: int
    value: float
    unit: str = ""
    quality_flag: str = "good"

    def validate(self) -> None:
        if not self.tag:
            raise ValidationError("sensor reading: tag must be non-empty")
        if self.quality_flag not in QUALITY_FLAGS:
            raise ValidationError(f"sensor reading: bad quality_flag {self.quality_flag!r}")


@dataclass(frozen=True)
class LabMeasurement:
    reel_id: str
    parameter: str
    value: float
    spec_low: float
    spec_high: float
    measured_at: int

    def validate(self) -> None:
        if not (self.spec_low < self.spec_high):
            raise ValidationError(
                f"lab measurement: spec_low {self.spec_low} must be < spec_high {self.spec_high}"
            )


@dataclass(frozen=True)
class AlarmEvent:
    alarm_id: str
    tag: str
    error_code: str
    severity: str
    state: str
    timestamp: int

    def validate(self) -> None:
        if self.severity not in SEVERITIES:
            raise ValidationError(f"alarm event: bad severity {self.severity!r}")
        if self.state not in ALARM_STATES:
            raise ValidationError(f"alarm event: bad state {self.state!r}")
        if not self.error_code:
            raise ValidationError("alarm event: error_code must be non-empty")


@dataclass(frozen=True)
class SortingBatch:
    delivery_id: str
    en643_grade: str
    composition: dict[str, float] = field(default_factory=dict)
    sorted_at: int = 0
    delivered_at: int = 0

    def validate(self) -> None:
        total = sum(self.composition.values())
        if abs(total - 1.0) > RATIO_SUM_TOL:
            raise ValidationError(
                f"sorting batch {self.delivery_id}: composition ratios sum to {total}, expected 1"
            )
        if self.sorted_at < self.delivered_at:
            raise ValidationError(
                f"sorting batch {self.delivery_id}: sorted_at before delivered_at"
            )


@dataclass(frozen=True)
class ReelRecord:
    """Boundary marker for a completed mother reel; timestamp is the reel end."""

    reel_id: str
    start: int
    end: int

    def validate(self) -> None:
        if self.end < self.start:
            raise ValidationError(f"reel {self.reel_id}: end before start")

    @property
    def timestamp(self) -> int:
        return self.end


Record = Union[SensorReading, LabMeasurement, AlarmEvent, SortingBatch, ReelRecord]

_KIND_BY_TYPE = {
    SensorReading: KIND_SENSOR,
    LabMeasurement: KIND_LAB,
    AlarmEvent: KIND_ALARM,
    SortingBatch: KIND_SORTING,
    ReelRecord: KIND_REEL,
}


def record_kind(record: Record) -> str:
    return _KIND_BY_TYPE[type(record)]


def record_timestamp(record: Record) -> int:
    """Emission timestamp used for ordering, quirks per kind folded in here."""
    if isinstance(record, SensorReading):
        return record.timestamp
    if isinstance(record, LabMeasurement):
        return record.measured_at
    if isinstance(record, AlarmEvent):
        return record.timestamp
    if isinstance(record, SortingBatch):
        return record.sorted_at
    return record.end


def record_tag(record: Record) -> str:
    """Secondary ordering key; a per-kind stable identifier."""
    if isinstance(record, SensorReading):
        return record.tag
    if isinstance(record, LabMeasurement):
        return record.parameter
    if isinstance(record, AlarmEvent):
        return record.alarm_id
    if isinstance(record, SortingBatch):
        return record.delivery_id
    return record.reel_id


def to_dict(record: Record) -> dict:
    d = {"kind": record_kind(record)}
    if isinstance(record, SensorReading):
        d.update(tag=record.tag, timestamp=record.timestamp, value=record.value,
                 unit=record.unit, quality_flag=record.quality_flag)
    elif isinstance(record, LabMeasurement):
        d.update(reel_id=record.reel_id, parameter=record.parameter, value=record.value,
                 spec_low=record.spec_low, spec_high=record.spec_high,
                 measured_at=record.measured_at)
    elif isinstance(record, AlarmEvent):
        d.update(alarm_id=record.alarm_id, tag=record.tag, error_code=record.error_code,
                 severity=record.severity, state=record.state, timestamp=record.timestamp)
    elif isinstance(record, SortingBatch):
        d.update(delivery_id=record.delivery_id, en643_grade=record.en643_grade,
                 composition=record.composition, sorted_at=record.sorted_at,
                 delivered_at=record.delivered_at)
    elif isinstance(record, ReelRecord):
        d.update(reel_id=record.reel_id, start=record.start, end=record.end)
    return d


def from_dict(d: dict) -> Record:
    kind = d.get("kind")
    try:
        if kind == KIND_SENSOR:
            return SensorReading(tag=d["tag"], timestamp=d["timestamp"], value=d["value"],
                                 unit=d.get("unit", ""), quality_flag=d.get("quality_flag", "good"))
        if kind == KIND_LAB:
            return LabMeasurement(reel_id=d["reel_id"], parameter=d["parameter"],
                                  value=d["value"], spec_low=d["spec_low"],
                                  spec_high=d["spec_high"], measured_at=d["measured_at"])
        if kind == KIND_ALARM:
            return AlarmEvent(alarm_id=d["alarm_id"], tag=d["tag"],
                              error_code=d["error_code"], severity=d["severity"],
                              state=d["state"], timestamp=d["timestamp"])
        if kind == KIND_SORTING:
            return SortingBatch(delivery_id=d["delivery_id"], en643_grade=d["en643_grade"],
                                composition=dict(d["composition"]), sorted_at=d["sorted_at"],
                                delivered_at=d["delivered_at"])
        if kind == KIND_REEL:
            return ReelRecord(reel_id=d["reel_id"], start=d["start"], end=d["end"])
    except KeyError as exc:
        raise ValidationError(f"record of kind {kind!r} missing field {exc}") from exc
    raise ValidationError(f"unknown record kind {kind!r}")


def to_line(record: Record) -> str:
    """Canonical single-line encoding; key order is fixed so output is byte-stable."""
    return json.dumps(to_dict(record), sort_keys=True, separators=(",", ":"))


def from_line(line: str) -> Record:
    try:
        d = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed record line: {exc}") from exc
    if not isinstance(d, dict):
        raise ValidationError("record line is not an object")
    return from_dict(d)


def write_log(records: Iterable[Record], fp: IO[str]) -> int:
    n = 0
    for record in records:
        fp.write(to_line(record))
        fp.write("\n")
        n += 1
    return n


def read_log(fp: IO[str]) -> Iterator[Record]:
    for line in fp:
        line = line.strip()
        if line:
            yield from_line(line)
