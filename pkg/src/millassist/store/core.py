"""Append-only event store.

Ingests the five record kinds, enforces their ordering invariants, serves
half-open time-window queries, and aligns multi-rate streams into fixed-length
per-reel feature vectors. Persistence is a directory of append-only segment
files in the same line format the scenario generator emits; the in-memory
index is rebuilt by scanning them on open.
"""

from __future__ import annotations

import bisect
import logging
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable

from ..errors import ConflictError, NotFoundError, RangeError, ValidationError
from ..records import (
    KIND_ALARM,
    KIND_LAB,
    KIND_REEL,
    KIND_SENSOR,
    KIND_SORTING,
    AlarmEvent,
    LabMeasurement,
    Record,
    ReelRecord,
    SensorReading,
    SortingBatch,
    from_line,
    record_kind,
    record_tag,
    record_timestamp,
    to_line,
)
from .features import MISSING, SORTING_PREFIX, FeatureField, FeatureVector

log = logging.getLogger(__name__)

_KINDS = (KIND_SENSOR, KIND_LAB, KIND_ALARM, KIND_SORTING, KIND_REEL)


@dataclass
class StoreConfig:
    """Knobs for persistence and the sorting-batch consumption heuristic."""

    data_dir: str | Path | None = None
    segment_records: int = 50_000
    # A sorted batch is assumed consumed inside this window after sorted_at.
    consumption_delay_s: tuple[float, float] = (3600.0, 90_000.0)


@dataclass
class BatchAssociation:
    """Best-effort link from a sorting batch to its consumption window."""

    batch: SortingBatch
    window: tuple[int, int]
    flag: str = "estimated"


class _TagSeries:
    """Timestamps and values of one sensor tag, strictly increasing."""

    __slots__ = ("times", "values")

    def __init__(self):
        self.times: list[int] = []
        self.values: list[float] = []


class EventStore:
    def __init__(self, config: StoreConfig | None = None):
        self.config = config or StoreConfig()
        self._lock = threading.RLock()
        self._seq = 0
        self._by_kind: dict[str, list[Record]] = {k: [] for k in _KINDS}
        self._kind_sorted: dict[str, bool] = {k: True for k in _KINDS}
        self._series: dict[str, _TagSeries] = {}
        self._tag_records: dict[str, list[SensorReading]] = {}
        self._reels: dict[str, ReelRecord] = {}
        self._raised_ids: set[str] = set()
        self._associations: dict[str, BatchAssociation] = {}
        self._segment_fp: IO[str] | None = None
        self._segment_count = 0
        self._segment_index = 0
        if self.config.data_dir is not None:
            self._open_data_dir(Path(self.config.data_dir))

    # --- persistence ------------------------------------------------------

    def _open_data_dir(self, root: Path) -> None:
        root.mkdir(parents=True, exist_ok=True)
        segments = sorted(root.glob("segment-*.jsonl"))
        for seg in segments:
            with open(seg) as fp:
                for line in fp:
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        record = from_line(line)
                    except (ValidationError, ValueError, KeyError):
                        log.warning("dropping partial trailing record in %s", seg)
                        break
                    self._ingest(record)
        self._segment_index = len(segments)
        self._roll_segment()

    def _roll_segment(self) -> None:
        if self.config.data_dir is None:
            return
        if self._segment_fp is not None:
            self._segment_fp.close()
        self._segment_index += 1
        path = Path(self.config.data_dir) / f"segment-{self._segment_index:06d}.jsonl"
        self._segment_fp = open(path, "a")
        self._segment_count = 0

    def _persist(self, record: Record) -> None:
        if self._segment_fp is None:
            return
        self._segment_fp.write(to_line(record) + "\n")
        self._segment_fp.flush()
        self._segment_count += 1
        if self._segment_count >= self.config.segment_records:
            self._roll_segment()

    def close(self) -> None:
        with self._lock:
            if self._segment_fp is not None:
                self._segment_fp.close()
                self._segment_fp = None

    # --- ingestion --------------------------------------------------------

    def append(self, record: Record) -> int:
        """Validate and store one record; returns its sequence number."""
        with self._lock:
            self._check(record)
            self._ingest(record)
            self._persist(record)
            return self._seq

    def _check(self, record: Record) -> None:
        record.validate()
        if isinstance(record, SensorReading):
            series = self._series.get(record.tag)
            if series is not None and series.times and record.timestamp <= series.times[-1]:
                raise ValidationError(
                    f"sensor {record.tag!r}: timestamp {record.timestamp} not after "
                    f"previous {series.times[-1]}")
        elif isinstance(record, AlarmEvent):
            if record.state == "cleared" and record.alarm_id not in self._raised_ids:
                raise ValidationError(
                    f"cleared alarm {record.alarm_id!r} was never raised")
        elif isinstance(record, LabMeasurement):
            reel = self._reels.get(record.reel_id)
            if reel is not None and record.measured_at < reel.end:
                raise ValidationError(
                    f"lab result for {record.reel_id!r} measured before reel end")
        elif isinstance(record, SortingBatch):
            if record.delivery_id in self._associations:
                raise ConflictError(f"duplicate delivery {record.delivery_id!r}")

    def _ingest(self, record: Record) -> None:
        self._seq += 1
        kind = record_kind(record)
        bucket = self._by_kind[kind]
        if bucket and record_timestamp(record) < record_timestamp(bucket[-1]):
            self._kind_sorted[kind] = False
        bucket.append(record)
        if isinstance(record, SensorReading):
            series = self._series.setdefault(record.tag, _TagSeries())
            series.times.append(record.timestamp)
            series.values.append(record.value)
            self._tag_records.setdefault(record.tag, []).append(record)
        elif isinstance(record, AlarmEvent):
            if record.state == "raised":
                self._raised_ids.add(record.alarm_id)
        elif isinstance(record, ReelRecord):
            self._reels[record.reel_id] = record
        elif isinstance(record, SortingBatch):
            self._associate(record)

    def _associate(self, batch: SortingBatch) -> BatchAssociation:
        lo, hi = self.config.consumption_delay_s
        window = (batch.sorted_at + int(lo * 1000), batch.sorted_at + int(hi * 1000))
        assoc = BatchAssociation(batch=batch, window=window)
        self._associations[batch.delivery_id] = assoc
        return assoc

    def attach_sorting_batch(self, batch: SortingBatch) -> BatchAssociation:
        """Register a batch and estimate when its paper gets consumed."""
        with self._lock:
            self._check(batch)
            self._ingest(batch)
            self._persist(batch)
            return self._associations[batch.delivery_id]

    def replay(self, fp: IO[str]) -> int:
        """Append every record from a line-delimited log; returns the count."""
        n = 0
        for line in fp:
            line = line.strip()
            if not line:
                continue
            self.append(from_line(line))
            n += 1
        return n

    # --- queries ----------------------------------------------------------

    def __len__(self) -> int:
        return self._seq

    @property
    def reel_ids(self) -> list[str]:
        with self._lock:
            return sorted(self._reels)

    def reel(self, reel_id: str) -> ReelRecord:
        with self._lock:
            try:
                return self._reels[reel_id]
            except KeyError:
                raise NotFoundError(f"unknown reel {reel_id!r}") from None

    def query_window(self, tag_or_kind: str, t0: int, t1: int) -> list[Record]:
        """Records with t0 <= timestamp < t1, timestamp order."""
        if t0 > t1:
            raise RangeError(f"window start {t0} after end {t1}")
        with self._lock:
            if tag_or_kind in self._series:
                series = self._series[tag_or_kind]
                i = bisect.bisect_left(series.times, t0)
                j = bisect.bisect_left(series.times, t1)
                return list(self._tag_records[tag_or_kind][i:j])
            if tag_or_kind in self._by_kind:
                bucket = self._sorted_kind(tag_or_kind)
                lo = bisect.bisect_left(bucket, t0, key=record_timestamp)
                hi = bisect.bisect_left(bucket, t1, key=record_timestamp)
                return list(bucket[lo:hi])
            return []

    def _sorted_kind(self, kind: str) -> list[Record]:
        bucket = self._by_kind[kind]
        if not self._kind_sorted[kind]:
            bucket.sort(key=record_timestamp)
            self._kind_sorted[kind] = True
        return bucket

    def export_window(self, t0: int, t1: int, fp: IO[str]) -> int:
        """Dump every record in [t0, t1) in canonical order; returns the count."""
        if t0 > t1:
            raise RangeError(f"window start {t0} after end {t1}")
        with self._lock:
            out: list[Record] = []
            for kind in _KINDS:
                out.extend(self.query_window(kind, t0, t1))
        out.sort(key=lambda r: (record_timestamp(r), record_kind(r), record_tag(r)))
        for record in out:
            fp.write(to_line(record) + "\n")
        return len(out)

    # --- feature alignment ------------------------------------------------

    def align_features(self, reel_id: str, feature_spec: list[FeatureField]) -> FeatureVector:
        """Fixed-length vector for one reel; absent data yields MISSING, never 0."""
        with self._lock:
            reel = self.reel(reel_id)
            names: list[str] = []
            values: list = []
            for fld in feature_spec:
                fld.validate()
                names.append(fld.name)
                values.append(self._field_value(reel, fld))
            return FeatureVector(reel_id=reel_id, names=names, values=values)

    def _field_value(self, reel: ReelRecord, fld: FeatureField):
        if fld.tag.startswith(SORTING_PREFIX):
            return self._sorting_value(reel, fld.tag[len(SORTING_PREFIX):])
        series = self._series.get(fld.tag)
        if series is None:
            raise ValidationError(f"unknown tag {fld.tag!r}")
        if fld.window == "reel":
            t0, t1 = reel.start, reel.end
        else:
            t1 = reel.end
            t0 = t1 - int(float(fld.window) * 1000)
        i = bisect.bisect_left(series.times, t0)
        j = bisect.bisect_left(series.times, t1)
        if fld.agg == "last":
            return series.values[j - 1] if j > 0 else MISSING
        if j <= i:
            return MISSING
        window = series.values[i:j]
        if fld.agg == "mean":
            return math.fsum(window) / len(window)
        if fld.agg == "min":
            return min(window)
        if fld.agg == "max":
            return max(window)
        mean = math.fsum(window) / len(window)
        return math.sqrt(math.fsum((v - mean) ** 2 for v in window) / len(window))

    def _sorting_value(self, reel: ReelRecord, fraction: str):
        best: BatchAssociation | None = None
        for assoc in self._associations.values():
            w0, w1 = assoc.window
            if w0 <= reel.start < w1:
                if best is None or assoc.batch.sorted_at > best.batch.sorted_at:
                    best = assoc
        if best is None:
            return MISSING
        return best.batch.composition.get(fraction, MISSING)

    def batch_for(self, delivery_id: str) -> BatchAssociation:
        with self._lock:
            try:
                return self._associations[delivery_id]
            except KeyError:
                raise NotFoundError(f"unknown delivery {delivery_id!r}") from None
