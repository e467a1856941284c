"""Bootstrap ensembles over the from-scratch trees.

A trained model is immutable: hyperparameters, feature names, seed, and every
tree are fixed at fit time and serialize to a self-describing JSON document,
so the same artifact always predicts the same numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..errors import ContractError, TrainingError
from .tree import ClassificationTree, RegressionTree

MODEL_SCHEMA = 1
MIN_TRAINING_SAMPLES = 50


@dataclass(frozen=True)
class Hyperparams:
    n_trees: int = 100
    max_depth: int = 18
    min_samples_leaf: int = 2
    feature_ratio: float = 0.4     # feature subset drawn per split candidate pool
    seed: int = 0

    def to_dict(self) -> dict:
        return {"n_trees": self.n_trees, "max_depth": self.max_depth,
                "min_samples_leaf": self.min_samples_leaf,
                "feature_ratio": self.feature_ratio, "seed": self.seed}

    @classmethod
    def from_dict(cls, doc: dict) -> "Hyperparams":
        return cls(**doc)


@dataclass
class TrainingReport:
    n_samples: int
    n_features: int
    oob_mae: float
    oob_mape: float
    degenerate: bool = False
    window: tuple[int, int] | None = None

    def to_dict(self) -> dict:
        return {"n_samples": self.n_samples, "n_features": self.n_features,
                "oob_mae": self.oob_mae, "oob_mape": self.oob_mape,
                "degenerate": self.degenerate,
                "window": list(self.window) if self.window else None}


def _as_matrix(X) -> np.ndarray:
    arr = np.asarray(X, dtype=float)
    if arr.ndim != 2:
        raise TrainingError("feature matrix must be 2-dimensional")
    return arr


class RegressionForest:
    """Bagged regression trees with OOB estimates and p10/p90 intervals."""

    def __init__(self, parameter: str, feature_names: list[str],
                 hyperparams: Hyperparams | None = None):
        self.parameter = parameter
        self.feature_names = list(feature_names)
        self.hyperparams = hyperparams or Hyperparams()
        self.trees: list[RegressionTree] = []
        self.report: TrainingReport | None = None
        self.model_version = ""

    @property
    def trained(self) -> bool:
        return bool(self.trees)

    def fit(self, X, y, window: tuple[int, int] | None = None) -> TrainingReport:
        X = _as_matrix(X)
        y = np.asarray(y, dtype=float)
        n, f = X.shape
        if f != len(self.feature_names):
            raise ContractError(
                f"matrix has {f} columns, feature spec names {len(self.feature_names)}")
        if n < MIN_TRAINING_SAMPLES:
            raise TrainingError(
                f"need at least {MIN_TRAINING_SAMPLES} samples, got {n}")
        if not np.isfinite(y).all():
            raise TrainingError("target contains non-finite values")
        # constant target still fits, but the report is flagged so callers
        # can see the model carries no information beyond the constant
        degenerate = float(y.max() - y.min()) == 0.0

        hp = self.hyperparams
        oob_sum = np.zeros(n)
        oob_count = np.zeros(n)
        self.trees = []
        for t in range(hp.n_trees):
            rng = np.random.default_rng([hp.seed, t])
            rows = rng.integers(0, n, size=n)
            tree = RegressionTree(max_depth=hp.max_depth,
                                  min_samples_leaf=hp.min_samples_leaf,
                                  feature_ratio=hp.feature_ratio)
            tree.fit(X[rows], y[rows], rng)
            self.trees.append(tree)
            oob = np.ones(n, dtype=bool)
            oob[rows] = False
            if oob.any():
                oob_sum[oob] += tree.predict(X[oob])
                oob_count[oob] += 1
        covered = oob_count > 0
        if covered.any():
            oob_pred = oob_sum[covered] / oob_count[covered]
            truth = y[covered]
            mae = float(np.mean(np.abs(oob_pred - truth)))
            denom = np.maximum(np.abs(truth), 1e-12)
            mape = float(np.mean(np.abs(oob_pred - truth) / denom))
        else:
            mae = mape = float("nan")
        self.report = TrainingReport(n_samples=n, n_features=f, oob_mae=mae,
                                     oob_mape=mape, degenerate=degenerate,
                                     window=window)
        self.model_version = f"{self.parameter}-{hp.seed}-{hp.n_trees}t-{n}s"
        return self.report

    def _check_features(self, X) -> np.ndarray:
        if not self.trained:
            raise TrainingError("model is not trained")
        X = _as_matrix(X)
        if X.shape[1] != len(self.feature_names):
            raise ContractError(
                f"expected {len(self.feature_names)} features "
                f"({', '.join(self.feature_names)}), got {X.shape[1]}")
        return X

    def tree_matrix(self, X) -> np.ndarray:
        """Per-tree predictions, shape (n_samples, n_trees)."""
        X = self._check_features(X)
        return np.column_stack([tree.predict(X) for tree in self.trees])

    def predict(self, X) -> np.ndarray:
        return self.tree_matrix(X).mean(axis=1)

    def predict_interval(self, X) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(point, p10, p90) across trees for each row."""
        votes = self.tree_matrix(X)
        return (votes.mean(axis=1),
                np.percentile(votes, 10, axis=1),
                np.percentile(votes, 90, axis=1))

    # --- artifact ---------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "model_schema": MODEL_SCHEMA,
            "kind": "regression_forest",
            "parameter": self.parameter,
            "feature_names": self.feature_names,
            "hyperparams": self.hyperparams.to_dict(),
            "model_version": self.model_version,
            "training": self.report.to_dict() if self.report else None,
            "trees": [tree.root.to_dict() for tree in self.trees],
        }

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True))

    @classmethod
    def from_dict(cls, doc: dict) -> "RegressionForest":
        if doc.get("model_schema") != MODEL_SCHEMA:
            raise ContractError(f"unsupported model schema {doc.get('model_schema')!r}")
        model = cls(parameter=doc["parameter"], feature_names=doc["feature_names"],
                    hyperparams=Hyperparams.from_dict(doc["hyperparams"]))
        model.model_version = doc["model_version"]
        if doc.get("training"):
            t = doc["training"]
            model.report = TrainingReport(
                n_samples=t["n_samples"], n_features=t["n_features"],
                oob_mae=t["oob_mae"], oob_mape=t["oob_mape"],
                degenerate=t.get("degenerate", False),
                window=tuple(t["window"]) if t.get("window") else None)
        from .tree import _Node
        for tree_doc in doc["trees"]:
            tree = RegressionTree(max_depth=model.hyperparams.max_depth,
                                  min_samples_leaf=model.hyperparams.min_samples_leaf,
                                  feature_ratio=model.hyperparams.feature_ratio)
            tree.root = _Node.from_dict(tree_doc)
            model.trees.append(tree)
        return model

    @classmethod
    def load(cls, path: str | Path) -> "RegressionForest":
        return cls.from_dict(json.loads(Path(path).read_text()))


class ClassificationForest:
    """Bagged classification trees; confidence is the winning vote fraction."""

    def __init__(self, labels: list[str], feature_names: list[str],
                 hyperparams: Hyperparams | None = None):
        if len(labels) < 2:
            raise TrainingError("need at least 2 class labels")
        self.labels = list(labels)
        self.feature_names = list(feature_names)
        self.hyperparams = hyperparams or Hyperparams(n_trees=60)
        self.trees: list[ClassificationTree] = []

    @property
    def trained(self) -> bool:
        return bool(self.trees)

    def fit(self, X, labels: list[str]) -> "ClassificationForest":
        X = _as_matrix(X)
        index = {label: i for i, label in enumerate(self.labels)}
        try:
            y = np.array([index[label] for label in labels], dtype=int)
        except KeyError as exc:
            raise TrainingError(f"unknown label {exc.args[0]!r}") from None
        n = X.shape[0]
        if n < MIN_TRAINING_SAMPLES:
            raise TrainingError(
                f"need at least {MIN_TRAINING_SAMPLES} samples, got {n}")
        hp = self.hyperparams
        self.trees = []
        for t in range(hp.n_trees):
            rng = np.random.default_rng([hp.seed, t])
            rows = rng.integers(0, n, size=n)
            tree = ClassificationTree(n_classes=len(self.labels),
                                      max_depth=hp.max_depth,
                                      min_samples_leaf=hp.min_samples_leaf,
                                      feature_ratio=hp.feature_ratio)
            tree.fit(X[rows], y[rows], rng)
            self.trees.append(tree)
        return self

    def predict(self, X) -> list[tuple[str, float]]:
        """(label, vote fraction) per row."""
        if not self.trained:
            raise TrainingError("model is not trained")
        X = _as_matrix(X)
        if X.shape[1] != len(self.feature_names):
            raise ContractError(
                f"expected {len(self.feature_names)} features, got {X.shape[1]}")
        votes = np.column_stack([tree.predict(X) for tree in self.trees])
        out = []
        for row in votes:
            counts = np.bincount(row, minlength=len(self.labels))
            winner = int(np.argmax(counts))
            out.append((self.labels[winner], counts[winner] / len(self.trees)))
        return out
