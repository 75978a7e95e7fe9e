"""Shared classifier plumbing: specs, validation, serialization.

Every model kind ships frozen default hyperparameters (recorded in report
output) and trains deterministically from (seed, data). Probability rows
sum to 1 and `predict` is the argmax with lowest-class-index tie-break.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from ..errors import DimensionMismatch, LabelOutOfRange, NonFiniteFeature, UnfittedModel

N_CLASSES = 4
CLASS_LABELS = (0, 1, 2, 3)

MODEL_KINDS = (
    "knn",
    "svm",
    "naive_bayes",
    "decision_tree",
    "random_forest",
    "ada_boost",
    "gradient_boosted_trees",
    "mlp",
)

DEFAULT_HYPERPARAMETERS: dict[str, dict] = {
    "knn": {"k": 5},
    "svm": {"c": 1.0, "epochs": 1000},
    "naive_bayes": {"var_smoothing": 1e-9},
    "decision_tree": {"min_samples_split": 2},
    "random_forest": {"n_trees": 100, "max_features": "sqrt", "min_samples_split": 2},
    "ada_boost": {"n_stages": 50, "stump_depth": 1},
    "gradient_boosted_trees": {"n_rounds": 100, "max_depth": 3, "learning_rate": 0.1},
    "mlp": {
        "hidden_units": 100,
        "epochs": 200,
        "batch_size": 32,
        "learning_rate": 0.1,
        "lr_decay": 0.99,
    },
}

SERIAL_FORMAT = "sevkit-model"
SERIAL_VERSION = 1


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str
    seed: int = 0
    hyperparameters: dict = field(default_factory=dict)

    def resolved_hyperparameters(self) -> dict:
        merged = dict(DEFAULT_HYPERPARAMETERS[self.kind])
        merged.update(self.hyperparameters)
        return merged


class Estimator(Protocol):
    def predict_proba(self, X: np.ndarray) -> np.ndarray: ...
    def to_state(self) -> dict: ...


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    estimator: Estimator
    class_labels: tuple[int, ...] = CLASS_LABELS

    def predict_proba(self, X) -> np.ndarray:
        X = validate_features(X)
        proba = self.estimator.predict_proba(X)
        return np.asarray(proba, dtype=np.float64)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.predict_proba(X), axis=1)


def validate_features(X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"feature matrix must be 2-D, got shape {X.shape}")
    if not np.isfinite(X).all():
        raise NonFiniteFeature("feature matrix contains NaN or infinity")
    return X


def validate_training_data(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = validate_features(X)
    y = np.asarray(y)
    if y.ndim != 1 or len(y) != X.shape[0]:
        raise DimensionMismatch(
            f"{X.shape[0]} feature rows vs {y.shape} labels"
        )
    if len(y) < 4:
        raise DimensionMismatch("need at least 4 training samples")
    y = y.astype(np.int64)
    if y.min() < 0 or y.max() >= N_CLASSES:
        raise LabelOutOfRange(f"labels must lie in 0..{N_CLASSES - 1}")
    return X, y


def rng_from_seed(seed: int) -> np.random.RandomState:
    return np.random.RandomState(seed % (2**32))


def softmax(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def save_model(model: TrainedModel, path: str | Path) -> None:
    blob = {
        "format": SERIAL_FORMAT,
        "version": SERIAL_VERSION,
        "kind": model.spec.kind,
        "seed": model.spec.seed,
        "hyperparameters": model.spec.resolved_hyperparameters(),
        "class_labels": list(model.class_labels),
        "state": model.estimator.to_state(),
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(blob, handle)


def load_blob(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as handle:
        blob = json.load(handle)
    if blob.get("format") != SERIAL_FORMAT:
        raise UnfittedModel(f"{path}: not a {SERIAL_FORMAT} file")
    if "state" not in blob or blob.get("kind") not in MODEL_KINDS:
        raise UnfittedModel(f"{path}: missing fitted state")
    return blob
