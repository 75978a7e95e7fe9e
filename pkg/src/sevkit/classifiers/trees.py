"""CART trees used directly and inside the ensembles.

Classification trees split on Gini impurity with sample weights (needed by
the boosted stumps); regression trees split on squared-error reduction and
let the caller override leaf values (needed by gradient boosting). Both are
built iteratively with an explicit stack and serialize to flat node lists.
"""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES

_EPS = 1e-12


def _gini_candidates(xs, ws, onehot_w, total_counts, total_weight):
    """Weighted Gini for every valid threshold along one sorted feature."""
    positions = np.nonzero(xs[:-1] < xs[1:])[0]
    if len(positions) == 0:
        return None
    left_counts = np.cumsum(onehot_w, axis=0)[positions]
    left_weight = np.maximum(np.cumsum(ws)[positions], _EPS)
    right_counts = total_counts - left_counts
    right_weight = np.maximum(total_weight - left_weight, _EPS)
    gini_left = 1.0 - np.sum((left_counts / left_weight[:, None]) ** 2, axis=1)
    gini_right = 1.0 - np.sum((right_counts / right_weight[:, None]) ** 2, axis=1)
    impurity = (left_weight * gini_left + right_weight * gini_right) / total_weight
    best = int(np.argmin(impurity))
    threshold = (xs[positions[best]] + xs[positions[best] + 1]) / 2.0
    return impurity[best], threshold


def _sse_candidates(xs, ws, targets, total_weight):
    """Weighted SSE for every valid threshold along one sorted feature."""
    positions = np.nonzero(xs[:-1] < xs[1:])[0]
    if len(positions) == 0:
        return None
    wt = ws * targets
    wt2 = ws * targets * targets
    sum_l = np.cumsum(wt)[positions]
    sq_l = np.cumsum(wt2)[positions]
    w_l = np.maximum(np.cumsum(ws)[positions], _EPS)
    sum_r = wt.sum() - sum_l
    sq_r = wt2.sum() - sq_l
    w_r = np.maximum(total_weight - w_l, _EPS)
    sse = (sq_l - sum_l**2 / w_l) + (sq_r - sum_r**2 / w_r)
    best = int(np.argmin(sse))
    threshold = (xs[positions[best]] + xs[positions[best] + 1]) / 2.0
    return sse[best], threshold


class DecisionTree:
    """Gini CART classifier over the fixed 4-class label set."""

    def __init__(self, max_depth=None, min_samples_split=2, max_features=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features  # int -> random subset per split
        self.nodes: list[dict] = []

    def fit(self, X, y, sample_weight=None, rng=None):
        n = X.shape[0]
        if sample_weight is None:
            sample_weight = np.full(n, 1.0 / n)
        self.nodes = []
        stack = [(np.arange(n), 0, None, None)]  # indices, depth, parent, side
        while stack:
            indices, depth, parent, side = stack.pop()
            node_id = len(self.nodes)
            if parent is not None:
                self.nodes[parent][side] = node_id
            ys = y[indices]
            ws = sample_weight[indices]
            total = ws.sum()
            counts = np.bincount(ys, weights=ws, minlength=N_CLASSES)
            value = counts / total if total > 0 else np.full(N_CLASSES, 1.0 / N_CLASSES)
            node = {"feature": -1, "threshold": 0.0, "left": -1, "right": -1,
                    "value": value.tolist()}
            self.nodes.append(node)

            impurity = 1.0 - np.sum((counts / total) ** 2) if total > 0 else 0.0
            if (
                impurity <= _EPS
                or len(indices) < self.min_samples_split
                or (self.max_depth is not None and depth >= self.max_depth)
            ):
                continue
            split = self._best_split(X, indices, ys, ws, counts, total, rng)
            if split is None:
                continue
            feature, threshold = split
            mask = X[indices, feature] <= threshold
            node["feature"] = int(feature)
            node["threshold"] = float(threshold)
            # push right first so left is processed first (stable node order)
            stack.append((indices[~mask], depth + 1, node_id, "right"))
            stack.append((indices[mask], depth + 1, node_id, "left"))
        return self

    def _best_split(self, X, indices, ys, ws, counts, total, rng):
        d = X.shape[1]
        if self.max_features is not None and rng is not None and self.max_features < d:
            features = rng.choice(d, size=self.max_features, replace=False)
        else:
            features = np.arange(d)
        onehot = np.zeros((len(ys), N_CLASSES))
        best = None
        for f in features:
            order = np.argsort(X[indices, f], kind="stable")
            xs = X[indices[order], f]
            ws_o = ws[order]
            onehot[:] = 0.0
            onehot[np.arange(len(ys)), ys[order]] = ws_o
            cand = _gini_candidates(xs, ws_o, onehot, counts, total)
            if cand is None:
                continue
            impurity, threshold = cand
            if best is None or impurity < best[0] - _EPS:
                best = (impurity, int(f), threshold)
        if best is None:
            return None
        parent_impurity = 1.0 - np.sum((counts / total) ** 2)
        if parent_impurity - best[0] <= _EPS:
            return None
        return best[1], best[2]

    def _leaf_values(self, X) -> np.ndarray:
        out = np.empty((X.shape[0], N_CLASSES))
        for i in range(X.shape[0]):
            node = self.nodes[0]
            while node["feature"] >= 0:
                if X[i, node["feature"]] <= node["threshold"]:
                    node = self.nodes[node["left"]]
                else:
                    node = self.nodes[node["right"]]
            out[i] = node["value"]
        return out

    def predict_proba(self, X) -> np.ndarray:
        return self._leaf_values(np.asarray(X, dtype=np.float64))

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)

    def to_state(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
            "nodes": self.nodes,
        }

    @classmethod
    def from_state(cls, state: dict) -> "DecisionTree":
        tree = cls(
            max_depth=state["max_depth"],
            min_samples_split=state["min_samples_split"],
            max_features=state["max_features"],
        )
        tree.nodes = state["nodes"]
        return tree


class RegressionTree:
    """Squared-error CART regressor with caller-supplied leaf values."""

    def __init__(self, max_depth=3, min_samples_split=2):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.nodes: list[dict] = []

    def fit(self, X, targets, leaf_value_fn=None):
        n = X.shape[0]
        ws = np.ones(n)
        stack = [(np.arange(n), 0, None, None)]
        self.nodes = []
        while stack:
            indices, depth, parent, side = stack.pop()
            node_id = len(self.nodes)
            if parent is not None:
                self.nodes[parent][side] = node_id
            ts = targets[indices]
            if leaf_value_fn is not None:
                value = float(leaf_value_fn(ts))
            else:
                value = float(ts.mean())
            node = {"feature": -1, "threshold": 0.0, "left": -1, "right": -1,
                    "value": value}
            self.nodes.append(node)

            if (
                len(indices) < self.min_samples_split
                or depth >= self.max_depth
                or np.ptp(ts) <= _EPS
            ):
                continue
            split = self._best_split(X, indices, ts, ws[indices])
            if split is None:
                continue
            feature, threshold = split
            mask = X[indices, feature] <= threshold
            node["feature"] = int(feature)
            node["threshold"] = float(threshold)
            stack.append((indices[~mask], depth + 1, node_id, "right"))
            stack.append((indices[mask], depth + 1, node_id, "left"))
        return self

    def _best_split(self, X, indices, ts, ws):
        total_weight = ws.sum()
        base_sse = float(((ts - ts.mean()) ** 2).sum())
        best = None
        for f in range(X.shape[1]):
            order = np.argsort(X[indices, f], kind="stable")
            xs = X[indices[order], f]
            cand = _sse_candidates(xs, ws[order], ts[order], total_weight)
            if cand is None:
                continue
            sse, threshold = cand
            if best is None or sse < best[0] - _EPS:
                best = (sse, int(f), threshold)
        if best is None or base_sse - best[0] <= _EPS:
            return None
        return best[1], best[2]

    def predict(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0])
        for i in range(X.shape[0]):
            node = self.nodes[0]
            while node["feature"] >= 0:
                if X[i, node["feature"]] <= node["threshold"]:
                    node = self.nodes[node["left"]]
                else:
                    node = self.nodes[node["right"]]
            out[i] = node["value"]
        return out

    def to_state(self) -> dict:
        return {"max_depth": self.max_depth,
                "min_samples_split": self.min_samples_split,
                "nodes": self.nodes}

    @classmethod
    def from_state(cls, state: dict) -> "RegressionTree":
        tree = cls(max_depth=state["max_depth"],
                   min_samples_split=state["min_samples_split"])
        tree.nodes = state["nodes"]
        return tree
