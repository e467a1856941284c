"""Per-reel quality forecasts combining point model, bands, and anomaly flag."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ValidationError
from .anomaly import DEFAULT_THRESHOLD, AnomalyReference, detect_extreme
from .classify import classify_quality
from .ensemble import RegressionForest


@dataclass(frozen=True)
class QualityForecast:
    reel_id: str
    parameter: str
    point_estimate: float
    p10: float
    p90: float
    quality_class: str
    anomaly_flag: bool
    model_version: str

    def __post_init__(self):
        if self.p10 > self.p90:
            raise ValidationError(f"p10 {self.p10} exceeds p90 {self.p90}")

    def to_dict(self) -> dict:
        return {"reel_id": self.reel_id, "parameter": self.parameter,
                "point_estimate": self.point_estimate,
                "interval": [self.p10, self.p90],
                "class": self.quality_class,
                "anomaly_flag": self.anomaly_flag,
                "model_version": self.model_version}


class QualityForecaster:
    """Wraps a trained forest with spec limits and an anomaly reference."""

    def __init__(self, model: RegressionForest, spec_low: float, spec_high: float,
                 reference: AnomalyReference | None = None,
                 guard_band: float = 0.0,
                 anomaly_threshold: float = DEFAULT_THRESHOLD):
        self.model = model
        self.spec_low = spec_low
        self.spec_high = spec_high
        self.reference = reference
        self.guard_band = guard_band
        self.anomaly_threshold = anomaly_threshold

    def forecast(self, reel_id: str, features) -> QualityForecast:
        row = np.asarray(features, dtype=float).reshape(1, -1)
        point, p10, p90 = self.model.predict_interval(row)
        flag = False
        if self.reference is not None:
            flag, _ = detect_extreme(row[0], self.reference,
                                     self.anomaly_threshold)
        est = float(point[0])
        return QualityForecast(
            reel_id=reel_id, parameter=self.model.parameter,
            point_estimate=est, p10=float(p10[0]), p90=float(p90[0]),
            quality_class=classify_quality(est, self.spec_low, self.spec_high,
                                           self.guard_band),
            anomaly_flag=flag, model_version=self.model.model_version)
