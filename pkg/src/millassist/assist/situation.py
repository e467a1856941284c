"""Situation recognition from a process image at the trigger moment."""

from __future__ import annotations

import numpy as np

from ..forecast import ClassificationForest, Hyperparams

LABEL_UNKNOWN = "unknown"
DEFAULT_CONFIDENCE_THRESHOLD = 0.5


class SituationClassifier:
    """Vote-fraction classifier over labeled process images.

    Below-threshold confidence degrades to the `unknown` label rather than
    guessing; so does an all-missing feature vector.
    """

    def __init__(self, forest: ClassificationForest,
                 threshold: float = DEFAULT_CONFIDENCE_THRESHOLD):
        self.forest = forest
        self.threshold = threshold

    @property
    def labels(self) -> list[str]:
        return list(self.forest.labels)

    def classify(self, features) -> tuple[str, float]:
        row = np.asarray(features, dtype=float)
        if row.ndim != 1:
            row = row.reshape(-1)
        if not np.isfinite(row).any():
            return LABEL_UNKNOWN, 0.0
        label, confidence = self.forest.predict(row.reshape(1, -1))[0]
        if confidence < self.threshold:
            return LABEL_UNKNOWN, confidence
        return label, confidence


def train_situation_classifier(X, labels: list[str], label_set: list[str],
                               feature_names: list[str],
                               hyperparams: Hyperparams | None = None,
                               threshold: float = DEFAULT_CONFIDENCE_THRESHOLD
                               ) -> SituationClassifier:
    forest = ClassificationForest(label_set, feature_names,
                                  hyperparams or Hyperparams(n_trees=60))
    forest.fit(X, labels)
    return SituationClassifier(forest, threshold=threshold)
