"""Gradient-trained models: linear one-vs-rest SVM and a one-hidden-layer MLP."""

from __future__ import annotations

import numpy as np

from .base import N_CLASSES, softmax


class LinearSvmOvr:
    """One-vs-rest linear hinge classifiers trained by full-batch subgradient
    descent with Pegasos step sizes and iterate averaging; probabilities via
    softmax over the four decision values.

    The bias is not regularized; its step shares the Pegasos schedule but is
    capped (the schedule's first steps are far too large for an unshrunk
    coordinate).
    """

    _BIAS_STEP_CAP = 100.0

    def __init__(self, c=1.0, epochs=1000):
        self.c = c
        self.epochs = epochs
        self.weights: np.ndarray | None = None  # (N_CLASSES, d)
        self.biases: np.ndarray | None = None

    def fit(self, X, y):
        n, d = X.shape
        lam = 1.0 / (self.c * n)
        self.weights = np.zeros((N_CLASSES, d))
        self.biases = np.zeros(N_CLASSES)
        for c in range(N_CLASSES):
            target = np.where(y == c, 1.0, -1.0)
            w = np.zeros(d)
            b = 0.0
            w_sum = np.zeros(d)
            b_sum = 0.0
            for t in range(1, self.epochs + 1):
                margins = target * (X @ w + b)
                violators = margins < 1.0
                grad_w = lam * w - (target[violators, None] * X[violators]).sum(axis=0) / n
                grad_b = -target[violators].sum() / n
                eta = 1.0 / (lam * t)
                w = w - eta * grad_w
                b = b - min(eta, self._BIAS_STEP_CAP) * grad_b
                w_sum += w
                b_sum += b
            self.weights[c] = w_sum / self.epochs
            self.biases[c] = b_sum / self.epochs
        return self

    def decision_values(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ self.weights.T + self.biases

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_values(X))

    def to_state(self) -> dict:
        return {"c": self.c, "epochs": self.epochs,
                "weights": self.weights.tolist(), "biases": self.biases.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "LinearSvmOvr":
        model = cls(c=state["c"], epochs=state["epochs"])
        model.weights = np.array(state["weights"])
        model.biases = np.array(state["biases"])
        return model


class MlpClassifier:
    """One hidden ReLU layer, softmax output, cross-entropy loss, plain
    minibatch SGD on a fixed exponential learning-rate schedule.

    `loss_history` records the full-training-set cross-entropy after each
    epoch.
    """

    def __init__(self, hidden_units=100, epochs=200, batch_size=32,
                 learning_rate=0.1, lr_decay=0.99):
        self.hidden_units = hidden_units
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.lr_decay = lr_decay
        self.w1 = self.b1 = self.w2 = self.b2 = None
        self.loss_history: list[float] = []

    def fit(self, X, y, rng):
        n, d = X.shape
        h = self.hidden_units
        self.w1 = rng.normal(0.0, np.sqrt(2.0 / d), size=(d, h))
        self.b1 = np.zeros(h)
        self.w2 = rng.normal(0.0, np.sqrt(2.0 / h), size=(h, N_CLASSES))
        self.b2 = np.zeros(N_CLASSES)
        onehot = np.eye(N_CLASSES)[y]
        self.loss_history = []
        for epoch in range(self.epochs):
            lr = self.learning_rate * (self.lr_decay**epoch)
            order = rng.permutation(n)
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                self._sgd_step(X[batch], onehot[batch], lr)
            self.loss_history.append(self._loss(X, onehot))
        return self

    def _forward(self, X):
        hidden = np.maximum(X @ self.w1 + self.b1, 0.0)
        return hidden, softmax(hidden @ self.w2 + self.b2)

    def _sgd_step(self, X, onehot, lr):
        m = X.shape[0]
        hidden, probs = self._forward(X)
        d_logits = (probs - onehot) / m
        d_w2 = hidden.T @ d_logits
        d_b2 = d_logits.sum(axis=0)
        d_hidden = (d_logits @ self.w2.T) * (hidden > 0)
        d_w1 = X.T @ d_hidden
        d_b1 = d_hidden.sum(axis=0)
        self.w2 -= lr * d_w2
        self.b2 -= lr * d_b2
        self.w1 -= lr * d_w1
        self.b1 -= lr * d_b1

    def _loss(self, X, onehot) -> float:
        _, probs = self._forward(X)
        return float(-np.mean(np.sum(onehot * np.log(probs + 1e-12), axis=1)))

    def predict_proba(self, X) -> np.ndarray:
        _, probs = self._forward(np.asarray(X, dtype=np.float64))
        return probs

    def to_state(self) -> dict:
        return {
            "hidden_units": self.hidden_units,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "learning_rate": self.learning_rate,
            "lr_decay": self.lr_decay,
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2.tolist(),
            "loss_history": self.loss_history,
        }

    @classmethod
    def from_state(cls, state: dict) -> "MlpClassifier":
        model = cls(
            hidden_units=state["hidden_units"],
            epochs=state["epochs"],
            batch_size=state["batch_size"],
            learning_rate=state["learning_rate"],
            lr_decay=state["lr_decay"],
        )
        model.w1 = np.array(state["w1"])
        model.b1 = np.array(state["b1"])
        model.w2 = np.array(state["w2"])
        model.b2 = np.array(state["b2"])
        model.loss_history = list(state["loss_history"])
        return model
