"""Lazy and generative baselines: k-nearest-neighbours and Gaussian NB."""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES


class KNearestNeighbors:
    """k-NN with unweighted Euclidean votes.

    Distance ties resolve by training-row order (stable sort), so the model
    is a pure function of the stored data.
    """

    def __init__(self, k=5):
        self.k = k
        self.X: np.ndarray | None = None
        self.y: np.ndarray | None = None

    def fit(self, X, y):
        self.X = np.array(X, dtype=np.float64)
        self.y = np.array(y, dtype=np.int64)
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        k = min(self.k, len(self.y))
        out = np.empty((X.shape[0], N_CLASSES))
        for start in range(0, X.shape[0], 256):
            chunk = X[start : start + 256]
            d2 = ((chunk[:, None, :] - self.X[None, :, :]) ** 2).sum(axis=2)
            nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
            for row, idx in enumerate(nearest):
                votes = np.bincount(self.y[idx], minlength=N_CLASSES)
                out[start + row] = votes / k
        return out

    def to_state(self) -> dict:
        return {"k": self.k, "X": self.X.tolist(), "y": self.y.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "KNearestNeighbors":
        model = cls(k=state["k"])
        model.X = np.array(state["X"], dtype=np.float64)
        model.y = np.array(state["y"], dtype=np.int64)
        return model


class GaussianNaiveBayes:
    """Per-class diagonal Gaussians with additive variance smoothing."""

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing
        self.means: np.ndarray | None = None
        self.variances: np.ndarray | None = None
        self.log_priors: np.ndarray | None = None

    def fit(self, X, y):
        n, d = X.shape
        self.means = np.zeros((N_CLASSES, d))
        self.variances = np.full((N_CLASSES, d), self.var_smoothing)
        # absent classes keep probability exactly zero
        self.log_priors = np.full(N_CLASSES, -np.inf)
        for c in range(N_CLASSES):
            rows = X[y == c]
            if len(rows) == 0:
                continue
            self.log_priors[c] = np.log(len(rows) / n)
            self.means[c] = rows.mean(axis=0)
            self.variances[c] = rows.var(axis=0) + self.var_smoothing
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        log_like = np.empty((X.shape[0], N_CLASSES))
        for c in range(N_CLASSES):
            diff = X - self.means[c]
            log_like[:, c] = (
                -0.5 * np.sum(np.log(2.0 * np.pi * self.variances[c]))
                - 0.5 * np.sum(diff * diff / self.variances[c], axis=1)
                + self.log_priors[c]
            )
        shifted = log_like - log_like.max(axis=1, keepdims=True)
        probs = np.exp(shifted)
        return probs / probs.sum(axis=1, keepdims=True)

    def to_state(self) -> dict:
        # store plain priors: -inf log-priors are not valid strict JSON
        with np.errstate(over="ignore"):
            priors = np.exp(self.log_priors)
        return {
            "var_smoothing": self.var_smoothing,
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
            "priors": priors.tolist(),
        }

    @classmethod
    def from_state(cls, state: dict) -> "GaussianNaiveBayes":
        model = cls(var_smoothing=state["var_smoothing"])
        model.means = np.array(state["means"])
        model.variances = np.array(state["variances"])
        with np.errstate(divide="ignore"):
            model.log_priors = np.log(np.array(state["priors"]))
        return model
