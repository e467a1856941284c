"""Composition root: one mill's worth of modules wired behind a single object.

The gateway endpoints and the CLI both talk to a Platform; nothing here opens
sockets.  The stream journal records alarm units and forecasts in the order
they were produced so subscribers replay exactly what the pipeline emitted.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..alarms import AlarmPipeline, AlarmPattern, PresentationUnit
from ..assist import AssistEngine, SituationClassifier
from ..errors import NotFoundError, TrainingError, ValidationError
from ..forecast import (ChangePointEvent, CusumDetector, EvaluationReport,
                        Hyperparams, QualityForecast, QualityForecaster,
                        RegressionForest, evaluate, fit_reference)
from ..knowledge import KnowledgeBase
from ..records import (KIND_ALARM, KIND_LAB, AlarmEvent, LabMeasurement,
                       Record, read_log)
from ..sim import ScenarioConfig, ScenarioPlan, build_scenario
from ..store import EventStore, FeatureField, StoreConfig

FAR_FUTURE = 2 ** 60


def feature_spec_for(config: ScenarioConfig) -> list[FeatureField]:
    """Reel-window mean+spread per sensor, latest sorting composition."""
    fields: list[FeatureField] = []
    for sensor in config.sensors:
        fields.append(FeatureField(sensor.tag, "mean"))
        fields.append(FeatureField(sensor.tag, "stddev"))
    for fraction in sorted(config.deliveries.base_composition):
        fields.append(FeatureField(f"sorting.{fraction}", "last"))
    return fields


@dataclass
class TrainedParameter:
    model: RegressionForest
    forecaster: QualityForecaster
    training_ids: list[str]
    holdout_ids: list[str]
    evaluation: EvaluationReport
    residual_sigma: float


class Platform:
    def __init__(self, config: ScenarioConfig, store: EventStore,
                 kb: KnowledgeBase | None = None,
                 patterns: list[AlarmPattern] | None = None,
                 chatter_window_s: float = 60.0,
                 audit_path: str | Path | None = None):
        self.config = config
        self.store = store
        self.kb = kb or KnowledgeBase()
        self.feature_spec = feature_spec_for(config)
        self.pipeline = AlarmPipeline(window_s=chatter_window_s,
                                      patterns=patterns,
                                      knowledge_base=self.kb)
        self.engine = AssistEngine(self.kb, audit_path=audit_path)
        self.trained: dict[str, TrainedParameter] = {}
        self.change_events: dict[str, list[ChangePointEvent]] = {}
        self._forecasts: dict[tuple[str, str], QualityForecast] = {}
        self._journal: list[dict] = []
        self._journal_lock = threading.Lock()
        self._flushed = False

    # --- construction -----------------------------------------------------

    @classmethod
    def from_records(cls, config: ScenarioConfig, records, **kwargs) -> "Platform":
        store = EventStore(StoreConfig(data_dir=kwargs.pop("data_dir", None)))
        platform = cls(config, store, **kwargs)
        for record in records:
            platform.ingest(record)
        platform.finish_stream()
        return platform

    @classmethod
    def from_scenario(cls, config: ScenarioConfig, **kwargs) -> "Platform":
        plan = build_scenario(config)
        platform = cls.from_records(config, plan.records, **kwargs)
        platform.plan = plan
        return platform

    @classmethod
    def from_log(cls, config: ScenarioConfig, log_path: str | Path,
                 **kwargs) -> "Platform":
        with open(log_path, "r", encoding="utf-8") as fp:
            records = list(read_log(fp))
        return cls.from_records(config, records, **kwargs)

    def ingest(self, record: Record) -> None:
        self.store.append(record)
        if isinstance(record, AlarmEvent):
            for unit in self.pipeline.feed(record):
                self._publish("alarm_unit", unit.to_dict())

    def finish_stream(self) -> None:
        if not self._flushed:
            for unit in self.pipeline.flush():
                self._publish("alarm_unit", unit.to_dict())
            self._flushed = True

    # --- journal ----------------------------------------------------------

    def _publish(self, kind: str, payload: dict) -> None:
        with self._journal_lock:
            self._journal.append({"seq": len(self._journal) + 1,
                                  "type": kind, "payload": payload})

    def journal(self, after_seq: int = 0) -> list[dict]:
        with self._journal_lock:
            return [e for e in self._journal if e["seq"] > after_seq]

    # --- alarms -----------------------------------------------------------

    def alarm_units(self) -> list[PresentationUnit]:
        return list(self.pipeline.units)

    def acknowledge(self, group_id: str, at_ms: int) -> PresentationUnit:
        if not self.pipeline.acknowledge(group_id, at_ms):
            raise NotFoundError(f"unknown alarm group {group_id!r}")
        for unit in self.pipeline.units:
            if unit.group.group_id == group_id:
                return unit
        raise NotFoundError(f"unknown alarm group {group_id!r}")

    def flood_metrics(self) -> dict:
        return self.pipeline.metrics().to_dict()

    # --- quality ----------------------------------------------------------

    def _labs(self, parameter: str) -> list[LabMeasurement]:
        labs = [r for r in self.store.query_window(KIND_LAB, 0, FAR_FUTURE)
                if r.parameter == parameter]
        return sorted(labs, key=lambda r: r.measured_at)

    def labeled_reels(self, parameter: str) -> dict[str, float]:
        """reel id -> mean lab value for the parameter."""
        sums: dict[str, list[float]] = {}
        for lab in self._labs(parameter):
            sums.setdefault(lab.reel_id, []).append(lab.value)
        return {reel_id: float(np.mean(vals))
                for reel_id, vals in sums.items()}

    def features_for(self, reel_id: str) -> np.ndarray:
        vector = self.store.align_features(reel_id, self.feature_spec)
        return np.array([np.nan if v is None else v
                         for v in vector.numeric()], dtype=float)

    def spec_limits(self, parameter: str) -> tuple[float, float]:
        spec = self.config.quality_model.get(parameter)
        if spec is None:
            raise NotFoundError(f"unknown quality parameter {parameter!r}")
        return spec.spec_low, spec.spec_high

    def anomaly_columns(self) -> set[str]:
        """Feature names eligible for rare-regime scoring.

        Operator-commanded settings move legitimately between campaigns and
        within-reel spread columns measure noise texture; both would dominate
        a max-coordinate score without indicating a rare stock state.  What
        remains: level columns of sensors tracking drifting process signals,
        plus the sorted-stock composition.
        """
        drifting = {s.tag for s in self.config.sensors
                    if s.source in self.config.drift}
        eligible = set()
        for fld in self.feature_spec:
            if fld.name.startswith("sorting."):
                eligible.add(fld.name)
            elif fld.agg == "mean" and (not drifting or fld.tag in drifting):
                eligible.add(fld.name)
        return eligible

    def train_quality(self, parameter: str,
                      hyperparams: Hyperparams | None = None,
                      holdout_fraction: float = 0.2) -> TrainedParameter:
        """Fit, hold out by reel id, evaluate, calibrate the drift detector."""
        spec_low, spec_high = self.spec_limits(parameter)
        labels = self.labeled_reels(parameter)
        if not labels:
            raise TrainingError(f"no lab data for {parameter}")
        reel_ids = sorted(labels)
        rng = np.random.default_rng([self.config.seed, 909])
        order = rng.permutation(len(reel_ids))
        n_holdout = max(1, int(round(len(reel_ids) * holdout_fraction)))
        holdout_ids = sorted(reel_ids[i] for i in order[:n_holdout])
        training_ids = sorted(reel_ids[i] for i in order[n_holdout:])
        if not training_ids:
            raise TrainingError("holdout fraction leaves no training reels")

        names = [f.name for f in self.feature_spec]
        X_train = np.vstack([self.features_for(r) for r in training_ids])
        y_train = np.array([labels[r] for r in training_ids])
        hp = hyperparams or Hyperparams(seed=self.config.seed)
        model = RegressionForest(parameter, names, hp)
        model.fit(X_train, y_train,
                  window=(0, self.store.query_window(
                      KIND_LAB, 0, FAR_FUTURE)[-1].measured_at))

        X_hold = np.vstack([self.features_for(r) for r in holdout_ids])
        y_hold = np.array([labels[r] for r in holdout_ids])
        report = evaluate(model, X_hold, y_hold, holdout_ids, training_ids,
                          spec_low, spec_high)
        residuals = model.predict(X_hold) - y_hold
        sigma = float(np.std(residuals))
        if sigma <= 0:
            sigma = max(model.report.oob_mae, 1e-9)

        reference = fit_reference(X_train, names)
        eligible = self.anomaly_columns()
        reference.excluded = sorted(set(reference.excluded)
                                    | {n for n in names if n not in eligible})
        forecaster = QualityForecaster(model, spec_low, spec_high,
                                       reference=reference)
        trained = TrainedParameter(model=model, forecaster=forecaster,
                                   training_ids=training_ids,
                                   holdout_ids=holdout_ids,
                                   evaluation=report, residual_sigma=sigma)
        self.trained[parameter] = trained
        self.detect_changes(parameter)
        return trained

    def _trained(self, parameter: str) -> TrainedParameter:
        trained = self.trained.get(parameter)
        if trained is None:
            raise TrainingError(f"no model trained for {parameter!r}")
        return trained

    def forecast(self, reel_id: str, parameter: str) -> QualityForecast:
        key = (reel_id, parameter)
        cached = self._forecasts.get(key)
        if cached is not None:
            return cached
        self.store.reel(reel_id)
        trained = self._trained(parameter)
        out = trained.forecaster.forecast(reel_id, self.features_for(reel_id))
        self._forecasts[key] = out
        self._publish("forecast", out.to_dict())
        return out

    def forecasts_for(self, reel_id: str) -> list[QualityForecast]:
        self.store.reel(reel_id)
        return [self.forecast(reel_id, parameter)
                for parameter in sorted(self.trained)]

    def detect_changes(self, parameter: str) -> list[ChangePointEvent]:
        """Run the drift detector over lab residuals in measurement order."""
        trained = self._trained(parameter)
        detector = CusumDetector(parameter, mean=0.0,
                                 sigma=trained.residual_sigma)
        for lab in self._labs(parameter):
            try:
                features = self.features_for(lab.reel_id)
            except NotFoundError:
                continue
            pred = float(trained.model.predict(features.reshape(1, -1))[0])
            detector.update(lab.value - pred, lab.measured_at)
        self.change_events[parameter] = detector.events
        return detector.events

    def change_points(self, parameter: str | None = None) -> list[ChangePointEvent]:
        if parameter is not None:
            return list(self.change_events.get(parameter, []))
        out: list[ChangePointEvent] = []
        for events in self.change_events.values():
            out.extend(events)
        return sorted(out, key=lambda e: (e.detected_at, e.parameter))

    # --- assist -----------------------------------------------------------

    def attach_classifier(self, classifier: SituationClassifier) -> None:
        self.engine.classifier = classifier
