"""Decision trees built from first principles.

Regression trees split on variance reduction, classification trees on Gini
impurity. Split search is vectorized: candidate thresholds are evaluated with
prefix sums over the sorted feature column. Missing values (NaN) follow the
branch that received the majority of the node's non-missing training rows,
both while growing and at prediction time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class _Node:
    # leaf: value set, feature -1; internal: children set
    feature: int = -1
    threshold: float = 0.0
    missing_left: bool = True
    left: "_Node | None" = None
    right: "_Node | None" = None
    value: float = 0.0

    @property
    def is_leaf(self) -> bool:
        return self.feature < 0

    def to_dict(self) -> dict:
        if self.is_leaf:
            return {"value": float(self.value)}
        return {
            "feature": self.feature,
            "threshold": float(self.threshold),
            "missing_left": self.missing_left,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "_Node":
        if "value" in doc:
            return cls(value=float(doc["value"]))
        return cls(
            feature=int(doc["feature"]),
            threshold=float(doc["threshold"]),
            missing_left=bool(doc["missing_left"]),
            left=cls.from_dict(doc["left"]),
            right=cls.from_dict(doc["right"]),
        )


def _best_split(col: np.ndarray, y: np.ndarray, min_leaf: int):
    """Best (threshold, score_gain) for one feature column, or None.

    Score is the reduction in total sum of squared deviations; computed for
    every admissible threshold at once via prefix sums.
    """
    miss = np.isnan(col)
    vals = col[~miss]
    target = y[~miss]
    m = vals.size
    if m < 2 * min_leaf:
        return None
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    sy = target[order]
    csum = np.cumsum(sy)
    total = csum[-1]
    left_n = np.arange(1, m)
    right_n = m - left_n
    left_sum = csum[:-1]
    right_sum = total - left_sum
    # maximizing sum(left)^2/n_l + sum(right)^2/n_r minimizes within-node SSE
    score = left_sum ** 2 / left_n + right_sum ** 2 / right_n
    valid = (sv[:-1] < sv[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)
    best = int(np.argmax(score))
    threshold = 0.5 * (sv[best] + sv[best + 1])
    gain = float(score[best] - total ** 2 / m)
    return threshold, gain


def _best_split_gini(col: np.ndarray, onehot: np.ndarray, min_leaf: int):
    """Like _best_split but maximizes Gini impurity decrease."""
    miss = np.isnan(col)
    vals = col[~miss]
    classes = onehot[~miss]
    m = vals.size
    if m < 2 * min_leaf:
        return None
    order = np.argsort(vals, kind="stable")
    sv = vals[order]
    counts = np.cumsum(classes[order], axis=0)
    total = counts[-1]
    left_counts = counts[:-1]
    right_counts = total - left_counts
    left_n = np.arange(1, m, dtype=float)
    right_n = m - left_n
    # node impurity weighted by size: n * (1 - sum p^2) = n - sum c^2 / n
    left_imp = left_n - (left_counts ** 2).sum(axis=1) / left_n
    right_imp = right_n - (right_counts ** 2).sum(axis=1) / right_n
    score = -(left_imp + right_imp)
    valid = (sv[:-1] < sv[1:]) & (left_n >= min_leaf) & (right_n >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, -np.inf)
    best = int(np.argmax(score))
    threshold = 0.5 * (sv[best] + sv[best + 1])
    parent_imp = m - float((total.astype(float) ** 2).sum()) / m
    gain = float(score[best] + parent_imp)
    return threshold, gain


class RegressionTree:
    def __init__(self, max_depth: int = 18, min_samples_leaf: int = 2,
                 feature_ratio: float = 1.0):
        self.max_depth = max_depth
        self.min_samples_leaf = max(1, min_samples_leaf)
        self.feature_ratio = feature_ratio
        self.root: _Node | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "RegressionTree":
        self.root = self._grow(X, y, rng, depth=0)
        return self

    def _n_candidates(self, n_features: int) -> int:
        return max(1, min(n_features, round(self.feature_ratio * n_features)))

    def _grow(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator,
              depth: int) -> _Node:
        node = _Node(value=float(y.mean()))
        if depth >= self.max_depth or y.size < 2 * self.min_samples_leaf:
            return node
        if float(y.max() - y.min()) == 0.0:
            return node
        n_features = X.shape[1]
        candidates = rng.choice(n_features, size=self._n_candidates(n_features),
                                replace=False)
        best = None
        for f in candidates:
            found = _best_split(X[:, f], y, self.min_samples_leaf)
            if found is None:
                continue
            threshold, gain = found
            if best is None or gain > best[2]:
                best = (int(f), threshold, gain)
        if best is None or best[2] <= 1e-12:
            return node
        f, threshold, _gain = best
        col = X[:, f]
        miss = np.isnan(col)
        go_left = col <= threshold
        left_n = int((go_left & ~miss).sum())
        right_n = int((~go_left & ~miss).sum())
        missing_left = left_n >= right_n
        mask = np.where(miss, missing_left, go_left)
        node.feature = f
        node.threshold = threshold
        node.missing_left = missing_left
        node.left = self._grow(X[mask], y[mask], rng, depth + 1)
        node.right = self._grow(X[~mask], y[~mask], rng, depth + 1)
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            node = self.root
            row = X[i]
            while not node.is_leaf:
                v = row[node.feature]
                if np.isnan(v):
                    node = node.left if node.missing_left else node.right
                elif v <= node.threshold:
                    node = node.left
                else:
                    node = node.right
            out[i] = node.value
        return out


class ClassificationTree:
    def __init__(self, n_classes: int, max_depth: int = 18,
                 min_samples_leaf: int = 1, feature_ratio: float = 1.0):
        self.n_classes = n_classes
        self.max_depth = max_depth
        self.min_samples_leaf = max(1, min_samples_leaf)
        self.feature_ratio = feature_ratio
        self.root: _Node | None = None

    def fit(self, X: np.ndarray, y: np.ndarray, rng: np.random.Generator) -> "ClassificationTree":
        onehot = np.eye(self.n_classes)[y]
        self.root = self._grow(X, y, onehot, rng, depth=0)
        return self

    def _grow(self, X: np.ndarray, y: np.ndarray, onehot: np.ndarray,
              rng: np.random.Generator, depth: int) -> _Node:
        counts = onehot.sum(axis=0)
        node = _Node(value=float(np.argmax(counts)))
        if depth >= self.max_depth or y.size < 2 * self.min_samples_leaf \
                or counts.max() == y.size:
            return node
        n_features = X.shape[1]
        k = max(1, min(n_features, round(self.feature_ratio * n_features)))
        candidates = rng.choice(n_features, size=k, replace=False)
        best = None
        for f in candidates:
            found = _best_split_gini(X[:, f], onehot, self.min_samples_leaf)
            if found is None:
                continue
            threshold, gain = found
            if best is None or gain > best[2]:
                best = (int(f), threshold, gain)
        if best is None or best[2] <= 1e-12:
            return node
        f, threshold, _gain = best
        col = X[:, f]
        miss = np.isnan(col)
        go_left = col <= threshold
        left_n = int((go_left & ~miss).sum())
        right_n = int((~go_left & ~miss).sum())
        missing_left = left_n >= right_n
        mask = np.where(miss, missing_left, go_left)
        node.feature = f
        node.threshold = threshold
        node.missing_left = missing_left
        node.left = self._grow(X[mask], y[mask], onehot[mask], rng, depth + 1)
        node.right = self._grow(X[~mask], y[~mask], onehot[~mask], rng, depth + 1)
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        out = np.empty(X.shape[0], dtype=int)
        for i in range(X.shape[0]):
            node = self.root
            row = X[i]
            while not node.is_leaf:
                v = row[node.feature]
                if np.isnan(v):
                    node = node.left if node.missing_left else node.right
                elif v <= node.threshold:
                    node = node.left
                else:
                    node = node.right
            out[i] = int(node.value)
        return out
