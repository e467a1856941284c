"""Robust distance scoring for feature vectors.

The reference is a median / MAD profile per feature column, fit on nominal
data.  A vector's score is the worst coordinate's absolute deviation in MAD
units, which keeps single-sensor excursions visible even when every other
channel looks healthy.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import TrainingError, ValidationError

log = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 4.0


@dataclass
class AnomalyReference:
    feature_names: list[str]
    medians: np.ndarray
    mads: np.ndarray
    excluded: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"feature_names": self.feature_names,
                "medians": self.medians.tolist(),
                "mads": self.mads.tolist(),
                "excluded": self.excluded}

    @classmethod
    def from_dict(cls, doc: dict) -> "AnomalyReference":
        return cls(feature_names=list(doc["feature_names"]),
                   medians=np.asarray(doc["medians"], dtype=float),
                   mads=np.asarray(doc["mads"], dtype=float),
                   excluded=list(doc.get("excluded", [])))


def fit_reference(X, feature_names: list[str]) -> AnomalyReference:
    """Column medians and raw MADs; zero-MAD columns are dropped from scoring."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise TrainingError("reference data must be 2-dimensional")
    if X.shape[1] != len(feature_names):
        raise TrainingError(
            f"matrix has {X.shape[1]} columns for {len(feature_names)} names")
    if X.shape[0] < 3:
        raise TrainingError("need at least 3 rows to fit a reference")
    medians = np.full(X.shape[1], np.nan)
    mads = np.full(X.shape[1], np.nan)
    has_data = ~np.all(np.isnan(X), axis=0)
    if has_data.any():
        medians[has_data] = np.nanmedian(X[:, has_data], axis=0)
        mads[has_data] = np.nanmedian(
            np.abs(X[:, has_data] - medians[has_data]), axis=0)
    excluded = [name for name, mad in zip(feature_names, mads)
                if not np.isfinite(mad) or mad == 0.0]
    for name in excluded:
        log.info("excluding constant feature %s from anomaly scoring", name)
    return AnomalyReference(feature_names=list(feature_names),
                            medians=medians, mads=mads, excluded=excluded)


def anomaly_score(vector, reference: AnomalyReference) -> float:
    """max over usable features of |x - median| / MAD.

    Missing coordinates (NaN) contribute nothing.  If every usable coordinate
    is missing the score is 0.0.
    """
    x = np.asarray(vector, dtype=float)
    if x.shape != reference.medians.shape:
        raise ValidationError(
            f"vector has {x.shape} shape, reference expects {reference.medians.shape}")
    usable = np.array([name not in reference.excluded
                       for name in reference.feature_names])
    usable &= np.isfinite(x)
    if not usable.any():
        return 0.0
    dev = np.abs(x[usable] - reference.medians[usable]) / reference.mads[usable]
    return float(dev.max())


def detect_extreme(vector, reference: AnomalyReference,
                   threshold: float = DEFAULT_THRESHOLD) -> tuple[bool, float]:
    score = anomaly_score(vector, reference)
    return score > threshold, score
