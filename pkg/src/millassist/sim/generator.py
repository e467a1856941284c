"""Builds a fully scheduled emission plan plus ground truth from a scenario config.

The plan is immutable once built: a sorted tuple of records (sensors, reels,
lab values, alarms, sorting batches) and a ground-truth object labeling every
alarm and recording every reel's true quality. All randomness flows from the
scenario seed through fixed per-domain substreams, so the same config always
produces the same bytes and adding, say, a fault does not reshuffle sensor
noise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import NotFoundError, OrderingError, ValidationError
from ..records import (
    AlarmEvent,
    LabMeasurement,
    Record,
    ReelRecord,
    SensorReading,
    SortingBatch,
    record_kind,
    record_tag,
    record_timestamp,
)
from .config import (
    ALL_SIGNALS,
    LATENT_SIGNALS,
    MOISTURE_STEAM_GAIN,
    SETTING_SIGNALS,
    SIGNAL_BASE,
    ScenarioConfig,
)

# Substream namespaces; each rng is seeded [seed, domain(, index)].
_DOM_SIGNALS = 1
_DOM_SENSOR = 2
_DOM_LAB = 3
_DOM_ALARM = 4
_DOM_DELIVERY = 5
_DOM_QUALITY = 6

# Default tag raising a fault's cascade alarms, per fault kind.
_FAULT_TAG = {
    "web_break_precursor": "draw_tension",
    "dryer_steam_drop": "steam_pressure",
    "stock_quality_shift": "stock_ash",
    "chattering_sensor": "",
}

LABEL_NUISANCE = "nuisance"
LABEL_FAULT_CAUSAL = "fault_causal"
LABEL_THRESHOLD_GENUINE = "threshold_genuine"

_SUSPECT_READING_RATE = 0.005

# Settings step occasionally, as if an operator re-trimmed the machine.
_SETPOINT_INTERVAL_S = 7200.0
_SETPOINT_DELTA = {"speed": 20.0, "refiner": 8.0, "steam": 0.12}


@dataclass
class FaultWindow:
    """Ground-truth span of one injected fault and the alarm ids it raised."""

    kind: str
    start_ms: int
    end_ms: int
    magnitude: float
    alarm_ids: list[str] = field(default_factory=list)


@dataclass
class GroundTruth:
    """Oracle data for a scenario: nothing downstream is allowed to peek at it
    except tests."""

    reel_quality: dict[str, dict[str, float]] = field(default_factory=dict)
    alarm_labels: dict[str, str] = field(default_factory=dict)
    fault_windows: list[FaultWindow] = field(default_factory=list)
    reel_spans: dict[str, tuple[int, int]] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "reel_quality": self.reel_quality,
            "alarm_labels": self.alarm_labels,
            "fault_windows": [
                {"kind": w.kind, "start_ms": w.start_ms, "end_ms": w.end_ms,
                 "magnitude": w.magnitude, "alarm_ids": w.alarm_ids}
                for w in self.fault_windows
            ],
            "reel_spans": {r: list(span) for r, span in self.reel_spans.items()},
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "GroundTruth":
        truth = cls(
            reel_quality={r: dict(v) for r, v in doc.get("reel_quality", {}).items()},
            alarm_labels=dict(doc.get("alarm_labels", {})),
            reel_spans={r: (int(a), int(b))
                        for r, (a, b) in doc.get("reel_spans", {}).items()},
        )
        for w in doc.get("fault_windows", []):
            truth.fault_windows.append(FaultWindow(
                kind=w["kind"], start_ms=int(w["start_ms"]), end_ms=int(w["end_ms"]),
                magnitude=float(w["magnitude"]), alarm_ids=list(w["alarm_ids"]),
            ))
        return truth

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":")))

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        return cls.from_json_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class ScenarioPlan:
    """Immutable emission plan: records sorted by (timestamp, kind, tag)."""

    config: ScenarioConfig
    records: tuple[Record, ...]
    ground_truth: GroundTruth

    @property
    def end_ms(self) -> int:
        return record_timestamp(self.records[-1]) if self.records else 0


@dataclass
class EmissionBatch:
    records: list[Record]

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)


class PlanStepper:
    """Walks a plan forward in time; the plan itself stays untouched."""

    def __init__(self, plan: ScenarioPlan):
        self.plan = plan
        self._idx = 0
        self._last_until: int | None = None

    def step(self, until_ms: int) -> EmissionBatch:
        """Return all records with timestamp <= until_ms not yet emitted."""
        if self._last_until is not None and until_ms < self._last_until:
            raise OrderingError(
                f"step until={until_ms} is before previous until={self._last_until}"
            )
        self._last_until = until_ms
        records = self.plan.records
        out: list[Record] = []
        while self._idx < len(records) and record_timestamp(records[self._idx]) <= until_ms:
            out.append(records[self._idx])
            self._idx += 1
        return EmissionBatch(out)

    def drain(self) -> EmissionBatch:
        return self.step(self.plan.end_ms)

    @property
    def exhausted(self) -> bool:
        return self._idx >= len(self.plan.records)


# --- signal trajectory ------------------------------------------------------

class _Signals:
    """Piecewise-constant signal levels over block_s blocks, faults applied."""

    def __init__(self, config: ScenarioConfig):
        self.block_ms = int(round(config.block_s * 1000))
        duration_ms = int(round(config.duration_s * 1000))
        self.duration_ms = duration_ms
        self.n_blocks = max(1, math.ceil(duration_ms / self.block_ms)) if duration_ms else 1
        rng = np.random.default_rng([config.seed, _DOM_SIGNALS])

        self.levels: dict[str, np.ndarray] = {}
        for name in ALL_SIGNALS:
            self.levels[name] = np.full(self.n_blocks, SIGNAL_BASE[name], dtype=float)

        for name in LATENT_SIGNALS:
            drift = config.drift.get(name)
            if drift is None or drift.sigma == 0.0:
                continue
            base = SIGNAL_BASE[name]
            x = base
            arr = self.levels[name]
            shocks = rng.normal(0.0, drift.sigma, size=self.n_blocks)
            for k in range(self.n_blocks):
                x = x + drift.theta * (base - x) + shocks[k]
                arr[k] = x

        # Operator setpoint steps on the settings, every couple of hours.
        step_blocks = max(1, int(round(_SETPOINT_INTERVAL_S / config.block_s)))
        for name in SETTING_SIGNALS:
            arr = self.levels[name]
            level = SIGNAL_BASE[name]
            delta = _SETPOINT_DELTA[name]
            for k in range(self.n_blocks):
                if k > 0 and k % step_blocks == 0 and rng.random() < 0.5:
                    level = SIGNAL_BASE[name] + rng.uniform(-delta, delta)
                arr[k] = level

        self._apply_faults(config)

        steam = self.levels["steam"]
        self.levels["moisture"] = (
            SIGNAL_BASE["moisture"] + MOISTURE_STEAM_GAIN * (SIGNAL_BASE["steam"] - steam)
        )

    def _block_range(self, config: ScenarioConfig, start_s: float,
                     duration_s: float | None) -> tuple[int, int]:
        b0 = int(start_s * 1000) // self.block_ms
        if duration_s is None:
            b1 = self.n_blocks
        else:
            b1 = math.ceil((start_s + duration_s) * 1000 / self.block_ms)
        return max(0, b0), min(self.n_blocks, max(b1, b0 + 1))

    def _apply_faults(self, config: ScenarioConfig) -> None:
        for fault in config.fault_plan:
            if fault.start_s * 1000 >= self.duration_ms:
                continue
            b0, b1 = self._block_range(config, fault.start_s, fault.duration_s)
            m = fault.magnitude
            if fault.kind == "stock_quality_shift":
                self.levels["ash"][b0:b1] += 4.0 * m
                self.levels["fiber"][b0:b1] -= 0.12 * m
            elif fault.kind == "dryer_steam_drop":
                self.levels["steam"][b0:b1] -= 1.0 * m
            elif fault.kind == "web_break_precursor":
                span = max(1, b1 - b0)
                ramp = np.linspace(0.3, 1.0, span)
                self.levels["tension"][b0:b1] += 40.0 * m * ramp
            # chattering_sensor perturbs no signal

    def at(self, name: str, t_ms: int) -> float:
        k = min(t_ms // self.block_ms, self.n_blocks - 1)
        return float(self.levels[name][k])

    def window_mean(self, name: str, t0_ms: int, t1_ms: int) -> float:
        """Exact time-weighted mean of the piecewise-constant level over [t0, t1)."""
        if t1_ms <= t0_ms:
            return float(self.levels[name][min(t0_ms // self.block_ms, self.n_blocks - 1)])
        arr = self.levels[name]
        total = 0.0
        t = t0_ms
        while t < t1_ms:
            k = min(t // self.block_ms, self.n_blocks - 1)
            block_end = (k + 1) * self.block_ms
            seg_end = min(t1_ms, block_end if block_end > t else t1_ms)
            total += arr[k] * (seg_end - t)
            t = seg_end
        return total / (t1_ms - t0_ms)


# --- alarm intents ----------------------------------------------------------

@dataclass
class _AlarmIntent:
    ts: int
    tag: str
    error_code: str
    severity: str
    label: str
    fault_index: int | None = None


def _fault_alarm_intents(config: ScenarioConfig, duration_ms: int) -> list[_AlarmIntent]:
    intents: list[_AlarmIntent] = []
    for i, fault in enumerate(config.fault_plan):
        start_ms = int(round(fault.start_s * 1000))
        if start_ms >= duration_ms:
            continue
        if fault.kind == "chattering_sensor":
            n = int(math.floor(fault.duration_s / fault.period_s))
            for k in range(n):
                ts = start_ms + int(round(k * fault.period_s * 1000))
                intents.append(_AlarmIntent(ts, fault.tag, fault.error_code,
                                            "warning", LABEL_NUISANCE, i))
        else:
            default_tag = _FAULT_TAG[fault.kind]
            for entry in fault.cascade:
                ts = start_ms + int(round(entry.offset_s * 1000))
                intents.append(_AlarmIntent(ts, entry.tag or default_tag,
                                            entry.error_code, entry.severity,
                                            LABEL_FAULT_CAUSAL, i))
    return intents


def _background_alarm_intents(config: ScenarioConfig, duration_ms: int) -> list[_AlarmIntent]:
    cfg = config.alarms
    if cfg.events_per_hour <= 0 or duration_ms == 0:
        return []
    rng = np.random.default_rng([config.seed, _DOM_ALARM])
    f = config.nuisance_alarm_fraction
    mean_burst = 0.5 * (cfg.burst_len[0] + cfg.burst_len[1])
    mean_cascade = (np.mean([len(c) for c in cfg.genuine_cascades])
                    if cfg.genuine_cascades else 1.0)
    mean_genuine = cfg.cascade_fraction * mean_cascade + (1 - cfg.cascade_fraction) * 1.0
    # Event-level nuisance probability such that the ALARM-level nuisance
    # fraction matches the configured value despite bursts being longer.
    denom = mean_burst * (1 - f) + f * mean_genuine
    q = (f * mean_genuine / denom) if denom > 0 else 0.0

    intents: list[_AlarmIntent] = []
    scale_ms = 3_600_000.0 / cfg.events_per_hour
    t = 0.0
    while True:
        t += rng.exponential(scale_ms)
        if t >= duration_ms:
            break
        ts = int(t)
        if rng.random() < q and cfg.nuisance_codes:
            code = cfg.nuisance_codes[int(rng.integers(len(cfg.nuisance_codes)))]
            length = int(rng.integers(cfg.burst_len[0], cfg.burst_len[1] + 1))
            period_ms = rng.uniform(*cfg.burst_period_s) * 1000.0
            severity = "warning" if rng.random() < 0.5 else "info"
            for k in range(length):
                ats = ts + int(round(k * period_ms))
                if ats >= duration_ms:
                    break
                intents.append(_AlarmIntent(ats, f"inst_{code}", code, severity,
                                            LABEL_NUISANCE))
        elif rng.random() < cfg.cascade_fraction and cfg.genuine_cascades:
            template = cfg.genuine_cascades[int(rng.integers(len(cfg.genuine_cascades)))]
            ats = ts
            for j, code in enumerate(template):
                if j > 0:
                    ats += int(round(rng.uniform(*cfg.cascade_gap_s) * 1000.0))
                if ats >= duration_ms:
                    break
                severity = "warning"
                if j == len(template) - 1 and rng.random() < cfg.critical_fraction:
                    severity = "alarm"
                intents.append(_AlarmIntent(ats, f"inst_{code}", code, severity,
                                            LABEL_THRESHOLD_GENUINE))
        else:
            code = cfg.genuine_codes[int(rng.integers(len(cfg.genuine_codes)))]
            severity = "alarm" if rng.random() < cfg.critical_fraction else "warning"
            intents.append(_AlarmIntent(ts, f"inst_{code}", code, severity,
                                        LABEL_THRESHOLD_GENUINE))
    return intents


# --- plan assembly ----------------------------------------------------------

def build_scenario(config: ScenarioConfig) -> ScenarioPlan:
    """Validate the config and build the full emission plan plus ground truth."""
    config.validate()
    duration_ms = int(round(config.duration_s * 1000))
    truth = GroundTruth()
    records: list[Record] = []

    if duration_ms == 0:
        return ScenarioPlan(config=config, records=(), ground_truth=truth)

    signals = _Signals(config)

    # Sensor streams: seeded gaps within bounds, values track the source signal.
    for s_idx, sensor in enumerate(config.sensors):
        rng = np.random.default_rng([config.seed, _DOM_SENSOR, s_idx])
        lo_ms = int(round(sensor.interval_s[0] * 1000))
        hi_ms = int(round(sensor.interval_s[1] * 1000))
        times: list[int] = []
        t = 0
        while t < duration_ms:
            times.append(t)
            t += int(rng.integers(lo_ms, hi_ms + 1))
        noise = rng.normal(0.0, sensor.noise_std, size=len(times)) if sensor.noise_std \
            else np.zeros(len(times))
        suspects = rng.random(len(times)) < _SUSPECT_READING_RATE
        for i, ts in enumerate(times):
            if sensor.source == "none":
                value = sensor.base_value + noise[i]
            else:
                dev = signals.at(sensor.source, ts) - SIGNAL_BASE[sensor.source]
                value = sensor.base_value + sensor.gain * dev + noise[i]
            records.append(SensorReading(
                tag=sensor.tag, timestamp=ts, value=float(value), unit=sensor.unit,
                quality_flag="suspect" if suspects[i] else "good"))

    # Reels and true quality.
    reel_ms = int(round(config.reel_duration_s * 1000))
    n_reels = duration_ms // reel_ms
    reel_ids: list[str] = []
    reel_mean_signals: list[dict[str, float]] = []
    for k in range(n_reels):
        reel_id = f"reel-{k + 1:06d}"
        start, end = k * reel_ms, (k + 1) * reel_ms
        reel_ids.append(reel_id)
        truth.reel_spans[reel_id] = (start, end)
        records.append(ReelRecord(reel_id=reel_id, start=start, end=end))
        reel_mean_signals.append(
            {name: signals.window_mean(name, start, end) for name in ALL_SIGNALS})

    for p_idx, (parameter, spec) in enumerate(config.quality_model.items()):
        rng = np.random.default_rng([config.seed, _DOM_QUALITY, p_idx])
        noise = rng.normal(0.0, spec.noise_std, size=n_reels) if spec.noise_std \
            else np.zeros(n_reels)
        for k, reel_id in enumerate(reel_ids):
            value = spec.evaluate(reel_mean_signals[k]) + noise[k]
            truth.reel_quality.setdefault(reel_id, {})[parameter] = float(value)

    # Lab measurements per sampling rule, with the optional daily cap.
    for p_idx, (parameter, rule) in enumerate(config.lab_plan.items()):
        spec = config.quality_model[parameter]
        rng = np.random.default_rng([config.seed, _DOM_LAB, p_idx])
        taken_per_day: dict[int, int] = {}
        for k, reel_id in enumerate(reel_ids):
            if rule.mode == "every_nth" and k % rule.every_n != 0:
                continue
            if rule.mode == "on_demand" and rng.random() >= rule.probability:
                continue
            _start, end = truth.reel_spans[reel_id]
            day = end // 86_400_000
            if rule.daily_cap is not None and taken_per_day.get(day, 0) >= rule.daily_cap:
                continue
            taken_per_day[day] = taken_per_day.get(day, 0) + 1
            measured_at = end + int(round(rule.delay_s * 1000))
            value = truth.reel_quality[reel_id][parameter]
            if rule.noise_std:
                value += float(rng.normal(0.0, rule.noise_std))
            records.append(LabMeasurement(
                reel_id=reel_id, parameter=parameter, value=float(value),
                spec_low=spec.spec_low, spec_high=spec.spec_high,
                measured_at=measured_at))

    # Alarms: fault cascades, chatter, and the seeded background process.
    intents = _fault_alarm_intents(config, duration_ms)
    intents += _background_alarm_intents(config, duration_ms)
    intents.sort(key=lambda a: (a.ts, a.error_code, a.tag))
    clear_rng = np.random.default_rng([config.seed, _DOM_ALARM, 1])
    fault_ids: dict[int, list[str]] = {}
    for n, intent in enumerate(intents):
        alarm_id = f"alm-{n + 1:06d}"
        truth.alarm_labels[alarm_id] = intent.label
        if intent.fault_index is not None:
            fault_ids.setdefault(intent.fault_index, []).append(alarm_id)
        records.append(AlarmEvent(alarm_id=alarm_id, tag=intent.tag,
                                  error_code=intent.error_code, severity=intent.severity,
                                  state="raised", timestamp=intent.ts))
        lo, hi = config.alarms.clear_after_s
        clear_ts = intent.ts + int(round(clear_rng.uniform(lo, hi) * 1000))
        records.append(AlarmEvent(alarm_id=alarm_id, tag=intent.tag,
                                  error_code=intent.error_code, severity=intent.severity,
                                  state="cleared", timestamp=clear_ts))

    for i, fault in enumerate(config.fault_plan):
        start_ms = int(round(fault.start_s * 1000))
        if start_ms >= duration_ms:
            continue
        if fault.duration_s is not None:
            end_ms = start_ms + int(round(fault.duration_s * 1000))
        else:
            end_ms = duration_ms
        truth.fault_windows.append(FaultWindow(
            kind=fault.kind, start_ms=start_ms, end_ms=min(end_ms, duration_ms),
            magnitude=fault.magnitude, alarm_ids=fault_ids.get(i, [])))

    # Sorting batches: delivered on schedule, sorted after a seeded delay.
    dcfg = config.deliveries
    rng = np.random.default_rng([config.seed, _DOM_DELIVERY])
    delivered = 0
    d_idx = 0
    while delivered < duration_ms:
        delivery_id = f"dlv-{d_idx + 1:04d}"
        delay_ms = int(round(rng.uniform(*dcfg.sorting_delay_s) * 1000))
        grade = dcfg.grades[int(rng.integers(len(dcfg.grades)))]
        names = list(dcfg.base_composition)
        raw = np.array([dcfg.base_composition[name] for name in names])
        raw = np.maximum(raw * (1.0 + 0.25 * rng.normal(size=len(raw))), 0.01)
        ratios = raw / raw.sum()
        ratios[-1] = 1.0 - float(ratios[:-1].sum())   # force exact unit sum
        records.append(SortingBatch(
            delivery_id=delivery_id, en643_grade=grade,
            composition={name: float(r) for name, r in zip(names, ratios)},
            sorted_at=delivered + delay_ms, delivered_at=delivered))
        delivered += int(round(dcfg.interval_s * 1000))
        d_idx += 1

    records.sort(key=lambda r: (record_timestamp(r), record_kind(r), record_tag(r)))
    return ScenarioPlan(config=config, records=tuple(records), ground_truth=truth)


def true_quality(plan: ScenarioPlan, reel_id: str) -> dict[str, float]:
    """Ground-truth quality values for one reel, keyed by parameter."""
    try:
        return dict(plan.ground_truth.reel_quality[reel_id])
    except KeyError:
        raise NotFoundError(f"unknown reel {reel_id!r}") from None


def write_plan_log(plan: ScenarioPlan, path: str | Path) -> int:
    """Write the emission log; returns the number of records written."""
    from ..records import write_log
    with open(path, "w") as fp:
        return write_log(plan.records, fp)
