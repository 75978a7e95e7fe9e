"""Tree ensembles: bagged forest, SAMME-boosted stumps, gradient boosting."""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES, softmax
from .trees import DecisionTree, RegressionTree


class RandomForest:
    """Bootstrap-bagged Gini trees, sqrt(d) features per split.

    Probabilities are the plain mean of the member trees' leaf
    distributions. Bootstrap draws index training rows, so resampling is
    keyed to row order.
    """

    def __init__(self, n_trees=100, max_features="sqrt", min_samples_split=2):
        self.n_trees = n_trees
        self.max_features = max_features
        self.min_samples_split = min_samples_split
        self.trees: list[DecisionTree] = []

    def fit(self, X, y, rng):
        n, d = X.shape
        if self.max_features == "sqrt":
            m = max(1, int(np.sqrt(d)))
        else:
            m = int(self.max_features)
        self.trees = []
        for _ in range(self.n_trees):
            sample = rng.randint(0, n, size=n)
            tree = DecisionTree(min_samples_split=self.min_samples_split,
                                max_features=m)
            tree.fit(X[sample], y[sample], rng=rng)
            self.trees.append(tree)
        return self

    def predict_proba(self, X) -> np.ndarray:
        total = np.zeros((np.asarray(X).shape[0], N_CLASSES))
        for tree in self.trees:
            total += tree.predict_proba(X)
        return total / len(self.trees)

    def to_state(self) -> dict:
        return {
            "n_trees": self.n_trees,
            "max_features": self.max_features,
            "min_samples_split": self.min_samples_split,
            "trees": [t.to_state() for t in self.trees],
        }

    @classmethod
    def from_state(cls, state: dict) -> "RandomForest":
        model = cls(n_trees=state["n_trees"], max_features=state["max_features"],
                    min_samples_split=state["min_samples_split"])
        model.trees = [DecisionTree.from_state(s) for s in state["trees"]]
        return model


class AdaBoostSamme:
    """SAMME boosting over depth-1 Gini stumps.

    Probabilities are the alpha-weighted vote shares, which keeps one-stage
    ensembles identical to their base stump.
    """

    def __init__(self, n_stages=50, stump_depth=1):
        self.n_stages = n_stages
        self.stump_depth = stump_depth
        self.stumps: list[DecisionTree] = []
        self.alphas: list[float] = []

    def fit(self, X, y, rng=None):
        n = X.shape[0]
        weights = np.full(n, 1.0 / n)
        self.stumps, self.alphas = [], []
        k = N_CLASSES
        for _ in range(self.n_stages):
            stump = DecisionTree(max_depth=self.stump_depth)
            stump.fit(X, y, sample_weight=weights)
            pred = stump.predict(X)
            miss = pred != y
            err = float(weights[miss].sum())
            if err <= 1e-12:
                self.stumps.append(stump)
                self.alphas.append(np.log((1.0 - 1e-10) / 1e-10) + np.log(k - 1.0))
                break
            if err >= 1.0 - 1.0 / k:
                if not self.stumps:  # keep one weak stump rather than none
                    self.stumps.append(stump)
                    self.alphas.append(1e-10)
                break
            alpha = np.log((1.0 - err) / err) + np.log(k - 1.0)
            self.stumps.append(stump)
            self.alphas.append(float(alpha))
            weights = weights * np.exp(alpha * miss)
            weights = weights / weights.sum()
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        votes = np.zeros((X.shape[0], N_CLASSES))
        for stump, alpha in zip(self.stumps, self.alphas):
            pred = stump.predict(X)
            votes[np.arange(X.shape[0]), pred] += alpha
        return votes / votes.sum(axis=1, keepdims=True)

    def to_state(self) -> dict:
        return {
            "n_stages": self.n_stages,
            "stump_depth": self.stump_depth,
            "alphas": self.alphas,
            "stumps": [s.to_state() for s in self.stumps],
        }

    @classmethod
    def from_state(cls, state: dict) -> "AdaBoostSamme":
        model = cls(n_stages=state["n_stages"], stump_depth=state["stump_depth"])
        model.alphas = list(state["alphas"])
        model.stumps = [DecisionTree.from_state(s) for s in state["stumps"]]
        return model


def _mart_leaf_value(residuals: np.ndarray) -> float:
    """Multiclass gradient-boosting leaf update for softmax loss."""
    denom = float(np.sum(np.abs(residuals) * (1.0 - np.abs(residuals))))
    if denom <= 1e-12:
        return 0.0
    k = N_CLASSES
    return (k - 1.0) / k * float(residuals.sum()) / denom


class GradientBoostedTrees:
    """Round-robin softmax gradient boosting with depth-limited regression
    trees, one per class per round. Stands in for XGBoost-style boosting
    without its extra regularization terms.
    """

    def __init__(self, n_rounds=100, max_depth=3, learning_rate=0.1):
        self.n_rounds = n_rounds
        self.max_depth = max_depth
        self.learning_rate = learning_rate
        self.rounds: list[list[RegressionTree]] = []

    def fit(self, X, y, rng=None):
        n = X.shape[0]
        onehot = np.eye(N_CLASSES)[y]
        scores = np.zeros((n, N_CLASSES))
        self.rounds = []
        for _ in range(self.n_rounds):
            probs = softmax(scores)
            stage: list[RegressionTree] = []
            for c in range(N_CLASSES):
                residual = onehot[:, c] - probs[:, c]
                tree = RegressionTree(max_depth=self.max_depth)
                tree.fit(X, residual, leaf_value_fn=_mart_leaf_value)
                scores[:, c] += self.learning_rate * tree.predict(X)
                stage.append(tree)
            self.rounds.append(stage)
        return self

    def decision_scores(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        scores = np.zeros((X.shape[0], N_CLASSES))
        for stage in self.rounds:
            for c, tree in enumerate(stage):
                scores[:, c] += self.learning_rate * tree.predict(X)
        return scores

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_scores(X))

    def to_state(self) -> dict:
        return {
            "n_rounds": self.n_rounds,
            "max_depth": self.max_depth,
            "learning_rate": self.learning_rate,
            "rounds": [[t.to_state() for t in stage] for stage in self.rounds],
        }

    @classmethod
    def from_state(cls, state: dict) -> "GradientBoostedTrees":
        model = cls(n_rounds=state["n_rounds"], max_depth=state["max_depth"],
                    learning_rate=state["learning_rate"])
        model.rounds = [[RegressionTree.from_state(s) for s in stage]
                        for stage in state["rounds"]]
        return model
