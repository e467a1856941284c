"""Scenario configuration: the key/value tree that fully determines a scenario.

A scenario document is YAML with a ``scenario_schema: 1`` marker. Everything
downstream (sensor streams, reels, lab values, alarms, deliveries and the
ground truth) is a pure function of this document, so two runs with the same
file are byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..errors import ValidationError

SCENARIO_SCHEMA = 1

# Process signals the mill model exposes. Latents drift on their own, settings
# hold their setpoint, derived signals are computed from others each block.
LATENT_SIGNALS = ("ash", "fiber", "tension")
SETTING_SIGNALS = ("speed", "refiner", "steam")
DERIVED_SIGNALS = ("moisture",)
ALL_SIGNALS = LATENT_SIGNALS + SETTING_SIGNALS + DERIVED_SIGNALS

SIGNAL_BASE = {
    "ash": 12.0,        # % filler content of the stock
    "fiber": 1.0,       # mean fiber length proxy, mm
    "tension": 300.0,   # web draw tension, N/m
    "speed": 900.0,     # machine speed, m/min
    "refiner": 150.0,   # refiner specific load, kWh/t
    "steam": 5.0,       # dryer steam pressure, bar
    "moisture": 7.5,    # sheet moisture after dryers, %
}

# Sheet moisture rises when dryer steam falls.
MOISTURE_STEAM_GAIN = 1.5

INTERVAL_MIN_S = 1
INTERVAL_MAX_S = 3600

FAULT_KINDS = (
    "web_break_precursor",
    "dryer_steam_drop",
    "stock_quality_shift",
    "chattering_sensor",
)

LAB_MODES = ("every_reel", "every_nth", "on_demand")


@dataclass
class SensorSpec:
    """One online sensor: where it sits, what it tracks, how it samples."""

    tag: str
    position_m: float = 0.0
    base_value: float = 0.0
    noise_std: float = 0.0
    interval_s: tuple[float, float] = (5.0, 15.0)
    source: str = "none"   # signal name it tracks, or "none" for a free-running tag
    gain: float = 1.0
    unit: str = ""

    def validate(self) -> None:
        if not self.tag:
            raise ValidationError("sensor spec: tag must be non-empty")
        lo, hi = self.interval_s
        if not (INTERVAL_MIN_S <= lo <= hi <= INTERVAL_MAX_S):
            raise ValidationError(
                f"sensor {self.tag}: interval_s must satisfy "
                f"{INTERVAL_MIN_S} <= low <= high <= {INTERVAL_MAX_S}, got {self.interval_s}"
            )
        if self.noise_std < 0:
            raise ValidationError(f"sensor {self.tag}: noise_std must be >= 0")
        if self.source != "none" and self.source not in ALL_SIGNALS:
            raise ValidationError(f"sensor {self.tag}: unknown source signal {self.source!r}")
        if self.position_m < 0:
            raise ValidationError(f"sensor {self.tag}: position_m must be >= 0")


@dataclass
class LabPlanRule:
    """Sampling rule for one laboratory parameter.

    ``daily_cap`` bounds values per parameter per day; None disables the cap.
    """

    mode: str = "every_reel"
    every_n: int = 1
    probability: float = 0.5       # on_demand: chance a reel gets sampled
    daily_cap: int | None = 50
    delay_s: float = 900.0         # reel end to lab result
    noise_std: float = 0.0         # measurement repeatability

    def validate(self, parameter: str) -> None:
        if self.mode not in LAB_MODES:
            raise ValidationError(f"lab_plan[{parameter}]: unknown mode {self.mode!r}")
        if self.mode == "every_nth" and self.every_n < 1:
            raise ValidationError(f"lab_plan[{parameter}]: every_n must be >= 1")
        if not (0.0 <= self.probability <= 1.0):
            raise ValidationError(f"lab_plan[{parameter}]: probability must be in [0,1]")
        if self.daily_cap is not None and self.daily_cap < 1:
            raise ValidationError(f"lab_plan[{parameter}]: daily_cap must be >= 1 or null")
        if self.delay_s < 0:
            raise ValidationError(f"lab_plan[{parameter}]: delay_s must be >= 0")


@dataclass
class QualitySpec:
    """True-quality model for one parameter: linear terms on signal deviations
    from base, pairwise interaction terms, plus Gaussian noise."""

    intercept: float
    spec_low: float
    spec_high: float
    terms: dict[str, float] = field(default_factory=dict)
    interactions: list[tuple[str, str, float]] = field(default_factory=list)
    noise_std: float = 0.0

    def validate(self, parameter: str) -> None:
        if not (self.spec_low < self.spec_high):
            raise ValidationError(f"quality_model[{parameter}]: spec_low must be < spec_high")
        for signal in self.terms:
            if signal not in ALL_SIGNALS:
                raise ValidationError(
                    f"quality_model[{parameter}]: unknown signal {signal!r} in terms"
                )
        for a, b, _n in self.interactions:
            if a not in ALL_SIGNALS or b not in ALL_SIGNALS:
                raise ValidationError(
                    f"quality_model[{parameter}]: unknown signal in interaction ({a},{b})"
                )
        if self.noise_std < 0:
            raise ValidationError(f"quality_model[{parameter}]: noise_std must be >= 0")

    def evaluate(self, signals: dict[str, float]) -> float:
        """Noise-free model value at the given signal levels."""
        value = self.intercept
        for signal, coef in self.terms.items():
            value += coef * (signals[signal] - SIGNAL_BASE[signal])
        for a, b, coef in self.interactions:
            value += coef * (signals[a] - SIGNAL_BASE[a]) * (signals[b] - SIGNAL_BASE[b])
        return value


@dataclass
class CascadeAlarm:
    error_code: str
    offset_s: float
    severity: str = "warning"
    tag: str = ""


@dataclass
class FaultInjection:
    """One injected disturbance with the alarm cascade it raises."""

    kind: str
    start_s: float
    magnitude: float = 1.0
    duration_s: float | None = None
    tag: str = ""              # chattering_sensor: which tag chatters
    error_code: str = ""       # chattering_sensor: repeated code
    period_s: float = 2.0      # chattering_sensor: repetition period
    cascade: list[CascadeAlarm] = field(default_factory=list)

    def validate(self, index: int) -> None:
        if self.kind not in FAULT_KINDS:
            raise ValidationError(f"fault_plan[{index}]: unknown kind {self.kind!r}")
        if self.start_s < 0:
            raise ValidationError(f"fault_plan[{index}]: start_s must be >= 0")
        offsets = [c.offset_s for c in self.cascade]
        if any(b <= a for a, b in zip(offsets, offsets[1:])):
            raise ValidationError(
                f"fault_plan[{index}]: cascade offsets must be strictly increasing"
            )
        if self.kind == "chattering_sensor":
            if self.period_s <= 0:
                raise ValidationError(f"fault_plan[{index}]: period_s must be > 0")
            if self.duration_s is None or self.duration_s <= 0:
                raise ValidationError(
                    f"fault_plan[{index}]: chattering_sensor needs duration_s > 0"
                )
            if not self.tag or not self.error_code:
                raise ValidationError(
                    f"fault_plan[{index}]: chattering_sensor needs tag and error_code"
                )


@dataclass
class AlarmNoiseConfig:
    """Background alarm process.

    Each seeded event is either a nuisance chatter burst or a genuine alarm
    (singleton or a short correlated cascade). The per-event mix is derived
    from ``nuisance_alarm_fraction`` so the fraction of individual alarms
    flagged nuisance matches the configured value.
    """

    events_per_hour: float = 40.0
    burst_len: tuple[int, int] = (8, 16)
    burst_period_s: tuple[float, float] = (2.0, 8.0)
    nuisance_codes: list[str] = field(default_factory=lambda: [
        "N101", "N102", "N103", "N104", "N105", "N106",
    ])
    genuine_codes: list[str] = field(default_factory=lambda: [
        "G201", "G210", "G220", "G230", "G240",
    ])
    genuine_cascades: list[list[str]] = field(default_factory=lambda: [
        ["G301", "G302", "G303"],
        ["G311", "G312", "G313"],
    ])
    cascade_fraction: float = 0.3      # of genuine events
    cascade_gap_s: tuple[float, float] = (3.0, 12.0)
    critical_fraction: float = 0.1     # of genuine alarms get severity "alarm"
    clear_after_s: tuple[float, float] = (30.0, 300.0)

    def validate(self) -> None:
        if self.events_per_hour < 0:
            raise ValidationError("alarms.events_per_hour must be >= 0")
        if self.burst_len[0] < 1 or self.burst_len[0] > self.burst_len[1]:
            raise ValidationError("alarms.burst_len must satisfy 1 <= low <= high")
        if not (0.0 <= self.cascade_fraction <= 1.0):
            raise ValidationError("alarms.cascade_fraction must be in [0,1]")
        if not (0.0 <= self.critical_fraction <= 1.0):
            raise ValidationError("alarms.critical_fraction must be in [0,1]")


@dataclass
class DeliveryConfig:
    """Recovered-paper deliveries and the sorting delay applied to each."""

    interval_s: float = 21600.0
    sorting_delay_s: tuple[float, float] = (3600.0, 259200.0)   # 1 h .. 72 h
    grades: list[str] = field(default_factory=lambda: ["1.02", "1.04", "4.01"])
    base_composition: dict[str, float] = field(default_factory=lambda: {
        "deinking": 0.40, "cardboard": 0.35, "mixed": 0.25,
    })

    def validate(self) -> None:
        if self.interval_s <= 0:
            raise ValidationError("deliveries.interval_s must be > 0")
        lo, hi = self.sorting_delay_s
        if lo < 0 or lo > hi:
            raise ValidationError("deliveries.sorting_delay_s must satisfy 0 <= low <= high")
        if abs(sum(self.base_composition.values()) - 1.0) > 1e-9:
            raise ValidationError("deliveries.base_composition must sum to 1")


@dataclass
class SignalDrift:
    """Mean-reverting random walk per block for a latent signal."""

    sigma: float = 0.0
    theta: float = 0.1


@dataclass
class ScenarioConfig:
    seed: int = 0
    duration_s: float = 3600.0
    reel_duration_s: float = 1800.0
    sensors: list[SensorSpec] = field(default_factory=list)
    lab_plan: dict[str, LabPlanRule] = field(default_factory=dict)
    quality_model: dict[str, QualitySpec] = field(default_factory=dict)
    fault_plan: list[FaultInjection] = field(default_factory=list)
    nuisance_alarm_fraction: float = 0.5
    alarms: AlarmNoiseConfig = field(default_factory=AlarmNoiseConfig)
    deliveries: DeliveryConfig = field(default_factory=DeliveryConfig)
    drift: dict[str, SignalDrift] = field(default_factory=dict)
    block_s: float = 60.0    # resolution of the latent signal trajectory

    def validate(self) -> None:
        if self.duration_s < 0:
            raise ValidationError("duration_s must be >= 0")
        if self.reel_duration_s <= 0:
            raise ValidationError("reel_duration_s must be > 0")
        if not (0.0 <= self.nuisance_alarm_fraction <= 1.0):
            raise ValidationError("nuisance_alarm_fraction must be in [0,1]")
        if self.block_s <= 0:
            raise ValidationError("block_s must be > 0")
        seen = set()
        for sensor in self.sensors:
            sensor.validate()
            if sensor.tag in seen:
                raise ValidationError(f"duplicate sensor tag {sensor.tag!r}")
            seen.add(sensor.tag)
        for parameter, rule in self.lab_plan.items():
            rule.validate(parameter)
            if parameter not in self.quality_model:
                raise ValidationError(
                    f"lab_plan[{parameter}]: no quality_model entry for this parameter"
                )
        for parameter, spec in self.quality_model.items():
            spec.validate(parameter)
        for i, fault in enumerate(self.fault_plan):
            fault.validate(i)
        for signal in self.drift:
            if signal not in LATENT_SIGNALS:
                raise ValidationError(f"drift[{signal}]: not a latent signal")
        self.alarms.validate()
        self.deliveries.validate()


def default_config(seed: int = 0, duration_s: float = 3600.0,
                   reel_duration_s: float = 1800.0) -> ScenarioConfig:
    """The reference mill: six tracked signals, three lab parameters.

    Tensile strength carries the headline forecasting target; scott bond and
    burst strength exercise the multi-parameter paths.
    """
    sensors = [
        SensorSpec("stock_ash", position_m=2.0, base_value=12.0, noise_std=0.25,
                   source="ash", unit="%"),
        SensorSpec("fiber_length", position_m=4.0, base_value=1.0, noise_std=0.02,
                   source="fiber", unit="mm"),
        SensorSpec("machine_speed", position_m=20.0, base_value=900.0, noise_std=1.0,
                   source="speed", unit="m/min"),
        SensorSpec("refiner_load", position_m=6.0, base_value=150.0, noise_std=1.5,
                   source="refiner", unit="kWh/t"),
        SensorSpec("steam_pressure", position_m=55.0, base_value=5.0, noise_std=0.04,
                   source="steam", unit="bar"),
        SensorSpec("sheet_moisture", position_m=70.0, base_value=7.5, noise_std=0.08,
                   source="moisture", unit="%"),
        SensorSpec("draw_tension", position_m=45.0, base_value=300.0, noise_std=3.0,
                   source="tension", unit="N/m"),
        SensorSpec("hall_temperature", position_m=0.0, base_value=24.0, noise_std=0.5,
                   source="none", unit="C"),
    ]
    quality_model = {
        "tensile_strength": QualitySpec(
            intercept=40.0, spec_low=36.0, spec_high=44.0,
            terms={"fiber": 25.0, "ash": -0.5, "moisture": -1.2, "refiner": 0.04},
            interactions=[("fiber", "refiner", 0.05)],
            noise_std=0.35,
        ),
        "scott_bond": QualitySpec(
            intercept=180.0, spec_low=160.0, spec_high=200.0,
            terms={"fiber": 60.0, "refiner": 0.30, "ash": -1.6, "moisture": -2.0},
            interactions=[],
            noise_std=2.0,
        ),
        "burst_strength": QualitySpec(
            intercept=220.0, spec_low=195.0, spec_high=245.0,
            terms={"fiber": 95.0, "ash": -2.4, "refiner": 0.25, "moisture": -2.5},
            interactions=[("fiber", "ash", -0.8)],
            noise_std=2.5,
        ),
    }
    lab_plan = {
        "tensile_strength": LabPlanRule(mode="every_reel", delay_s=900.0, noise_std=0.15),
        "scott_bond": LabPlanRule(mode="every_nth", every_n=2, delay_s=1200.0, noise_std=1.0),
        "burst_strength": LabPlanRule(mode="on_demand", probability=0.4, delay_s=1500.0,
                                      noise_std=1.2),
    }
    drift = {
        "ash": SignalDrift(sigma=0.9, theta=0.12),
        "fiber": SignalDrift(sigma=0.05, theta=0.10),
        "tension": SignalDrift(sigma=2.0, theta=0.25),
    }
    return ScenarioConfig(
        seed=seed,
        duration_s=duration_s,
        reel_duration_s=reel_duration_s,
        sensors=sensors,
        lab_plan=lab_plan,
        quality_model=quality_model,
        drift=drift,
    )


# --- YAML round-trip -------------------------------------------------------

def _as_dict(config: ScenarioConfig) -> dict:
    return {
        "scenario_schema": SCENARIO_SCHEMA,
        "seed": config.seed,
        "duration_s": config.duration_s,
        "reel_duration_s": config.reel_duration_s,
        "block_s": config.block_s,
        "nuisance_alarm_fraction": config.nuisance_alarm_fraction,
        "sensors": [
            {
                "tag": s.tag, "position_m": s.position_m, "base_value": s.base_value,
                "noise_std": s.noise_std, "interval_s": list(s.interval_s),
                "source": s.source, "gain": s.gain, "unit": s.unit,
            }
            for s in config.sensors
        ],
        "lab_plan": {
            p: {
                "mode": r.mode, "every_n": r.every_n, "probability": r.probability,
                "daily_cap": r.daily_cap, "delay_s": r.delay_s, "noise_std": r.noise_std,
            }
            for p, r in config.lab_plan.items()
        },
        "quality_model": {
            p: {
                "intercept": q.intercept, "spec_low": q.spec_low, "spec_high": q.spec_high,
                "terms": dict(q.terms),
                "interactions": [list(t) for t in q.interactions],
                "noise_std": q.noise_std,
            }
            for p, q in config.quality_model.items()
        },
        "fault_plan": [
            {
                "kind": f.kind, "start_s": f.start_s, "magnitude": f.magnitude,
                "duration_s": f.duration_s, "tag": f.tag, "error_code": f.error_code,
                "period_s": f.period_s,
                "cascade": [
                    {"error_code": c.error_code, "offset_s": c.offset_s,
                     "severity": c.severity, "tag": c.tag}
                    for c in f.cascade
                ],
            }
            for f in config.fault_plan
        ],
        "alarms": {
            "events_per_hour": config.alarms.events_per_hour,
            "burst_len": list(config.alarms.burst_len),
            "burst_period_s": list(config.alarms.burst_period_s),
            "nuisance_codes": list(config.alarms.nuisance_codes),
            "genuine_codes": list(config.alarms.genuine_codes),
            "genuine_cascades": [list(c) for c in config.alarms.genuine_cascades],
            "cascade_fraction": config.alarms.cascade_fraction,
            "cascade_gap_s": list(config.alarms.cascade_gap_s),
            "critical_fraction": config.alarms.critical_fraction,
            "clear_after_s": list(config.alarms.clear_after_s),
        },
        "deliveries": {
            "interval_s": config.deliveries.interval_s,
            "sorting_delay_s": list(config.deliveries.sorting_delay_s),
            "grades": list(config.deliveries.grades),
            "base_composition": dict(config.deliveries.base_composition),
        },
        "drift": {s: {"sigma": d.sigma, "theta": d.theta} for s, d in config.drift.items()},
    }


def _from_dict(doc: dict) -> ScenarioConfig:
    schema = doc.get("scenario_schema")
    if schema != SCENARIO_SCHEMA:
        raise ValidationError(
            f"scenario_schema: expected {SCENARIO_SCHEMA}, got {schema!r}"
        )
    config = ScenarioConfig(
        seed=int(doc.get("seed", 0)),
        duration_s=float(doc.get("duration_s", 3600.0)),
        reel_duration_s=float(doc.get("reel_duration_s", 1800.0)),
        block_s=float(doc.get("block_s", 60.0)),
        nuisance_alarm_fraction=float(doc.get("nuisance_alarm_fraction", 0.5)),
    )
    for s in doc.get("sensors", []):
        config.sensors.append(SensorSpec(
            tag=s["tag"], position_m=float(s.get("position_m", 0.0)),
            base_value=float(s.get("base_value", 0.0)),
            noise_std=float(s.get("noise_std", 0.0)),
            interval_s=tuple(s.get("interval_s", [5.0, 15.0])),
            source=s.get("source", "none"), gain=float(s.get("gain", 1.0)),
            unit=s.get("unit", ""),
        ))
    for p, r in doc.get("lab_plan", {}).items():
        config.lab_plan[p] = LabPlanRule(
            mode=r.get("mode", "every_reel"), every_n=int(r.get("every_n", 1)),
            probability=float(r.get("probability", 0.5)),
            daily_cap=r.get("daily_cap", 50),
            delay_s=float(r.get("delay_s", 900.0)),
            noise_std=float(r.get("noise_std", 0.0)),
        )
    for p, q in doc.get("quality_model", {}).items():
        config.quality_model[p] = QualitySpec(
            intercept=float(q["intercept"]), spec_low=float(q["spec_low"]),
            spec_high=float(q["spec_high"]),
            terms={k: float(v) for k, v in q.get("terms", {}).items()},
            interactions=[(a, b, float(c)) for a, b, c in q.get("interactions", [])],
            noise_std=float(q.get("noise_std", 0.0)),
        )
    for f in doc.get("fault_plan", []):
        config.fault_plan.append(FaultInjection(
            kind=f["kind"], start_s=float(f["start_s"]),
            magnitude=float(f.get("magnitude", 1.0)),
            duration_s=None if f.get("duration_s") is None else float(f["duration_s"]),
            tag=f.get("tag", ""), error_code=f.get("error_code", ""),
            period_s=float(f.get("period_s", 2.0)),
            cascade=[
                CascadeAlarm(error_code=c["error_code"], offset_s=float(c["offset_s"]),
                             severity=c.get("severity", "warning"), tag=c.get("tag", ""))
                for c in f.get("cascade", [])
            ],
        ))
    if "alarms" in doc:
        a = doc["alarms"]
        config.alarms = AlarmNoiseConfig(
            events_per_hour=float(a.get("events_per_hour", 40.0)),
            burst_len=tuple(a.get("burst_len", [8, 16])),
            burst_period_s=tuple(a.get("burst_period_s", [2.0, 8.0])),
            nuisance_codes=list(a.get("nuisance_codes",
                                      AlarmNoiseConfig().nuisance_codes)),
            genuine_codes=list(a.get("genuine_codes", AlarmNoiseConfig().genuine_codes)),
            genuine_cascades=[list(c) for c in a.get(
                "genuine_cascades", AlarmNoiseConfig().genuine_cascades)],
            cascade_fraction=float(a.get("cascade_fraction", 0.3)),
            cascade_gap_s=tuple(a.get("cascade_gap_s", [3.0, 12.0])),
            critical_fraction=float(a.get("critical_fraction", 0.1)),
            clear_after_s=tuple(a.get("clear_after_s", [30.0, 300.0])),
        )
    if "deliveries" in doc:
        d = doc["deliveries"]
        config.deliveries = DeliveryConfig(
            interval_s=float(d.get("interval_s", 21600.0)),
            sorting_delay_s=tuple(d.get("sorting_delay_s", [3600.0, 259200.0])),
            grades=list(d.get("grades", DeliveryConfig().grades)),
            base_composition=dict(d.get("base_composition",
                                        DeliveryConfig().base_composition)),
        )
    for s, v in doc.get("drift", {}).items():
        config.drift[s] = SignalDrift(sigma=float(v.get("sigma", 0.0)),
                                      theta=float(v.get("theta", 0.1)))
    return config


def save_config(config: ScenarioConfig, path: str | Path) -> None:
    config.validate()
    Path(path).write_text(yaml.safe_dump(_as_dict(config), sort_keys=False))


def load_config(path: str | Path) -> ScenarioConfig:
    doc = yaml.safe_load(Path(path).read_text())
    if not isinstance(doc, dict):
        raise ValidationError("scenario config: document is not a mapping")
    config = _from_dict(doc)
    config.validate()
    return config
