"""Holdout evaluation reports for trained quality models."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ValidationError
from .classify import ALL_CLASSES, classify_quality
from .ensemble import RegressionForest

WITHIN_BAND = 0.10


@dataclass
class EvaluationReport:
    model_version: str
    parameter: str
    n_holdout: int
    mape: float
    within_rate: float
    per_class_recall: dict[str, float] = field(default_factory=dict)
    confusion: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"model_version": self.model_version, "parameter": self.parameter,
                "n_holdout": self.n_holdout, "mape": self.mape,
                "within_rate": self.within_rate,
                "per_class_recall": self.per_class_recall,
                "confusion": self.confusion}


def check_disjoint(training_ids, holdout_ids) -> None:
    overlap = set(training_ids) & set(holdout_ids)
    if overlap:
        sample = sorted(overlap)[:5]
        raise ValidationError(
            f"training and holdout partitions share {len(overlap)} reels, "
            f"e.g. {', '.join(sample)}")


def evaluate(model: RegressionForest, X, y, holdout_ids, training_ids,
             spec_low: float, spec_high: float,
             guard_band: float = 0.0) -> EvaluationReport:
    """Score predictions on a holdout set disjoint from training.

    Classes for the confusion matrix come from banding both the lab value and
    the prediction against the same spec limits.
    """
    check_disjoint(training_ids, holdout_ids)
    y = np.asarray(y, dtype=float)
    holdout_ids = list(holdout_ids)
    if len(holdout_ids) != len(y):
        raise ValidationError("holdout ids and targets differ in length")
    pred = model.predict(X)

    denom = np.maximum(np.abs(y), 1e-12)
    rel = np.abs(pred - y) / denom
    mape = float(rel.mean()) if len(y) else float("nan")
    within = float((rel <= WITHIN_BAND).mean()) if len(y) else float("nan")

    confusion = {a: {b: 0 for b in ALL_CLASSES} for a in ALL_CLASSES}
    for truth, est in zip(y, pred):
        t_class = classify_quality(float(truth), spec_low, spec_high, guard_band)
        p_class = classify_quality(float(est), spec_low, spec_high, guard_band)
        confusion[t_class][p_class] += 1
    recall = {}
    for label in ALL_CLASSES:
        total = sum(confusion[label].values())
        if total:
            recall[label] = confusion[label][label] / total
    return EvaluationReport(model_version=model.model_version,
                            parameter=model.parameter,
                            n_holdout=len(y), mape=mape, within_rate=within,
                            per_class_recall=recall, confusion=confusion)


def write_report(report: EvaluationReport, path: str | Path) -> None:
    with open(path, "a", encoding="utf-8") as fp:
        fp.write(json.dumps(report.to_dict(), sort_keys=True,
                            separators=(",", ":")) + "\n")


def read_reports(path: str | Path) -> list[EvaluationReport]:
    out = []
    for line in Path(path).read_text().splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        out.append(EvaluationReport(**doc))
    return out
