"""Eight multi-class severity classifiers behind one fit/predict surface."""

from __future__ import annotations

from pathlib import Path

from .base import (
    CLASS_LABELS,
    DEFAULT_HYPERPARAMETERS,
    MODEL_KINDS,
    N_CLASSES,
    ClassifierSpec,
    TrainedModel,
    load_blob,
    rng_from_seed,
    save_model,
    validate_training_data,
)
from .ensembles import AdaBoostSamme, GradientBoostedTrees, RandomForest
from .linear import LinearSvmOvr, MlpClassifier
from .simple import GaussianNaiveBayes, KNearestNeighbors
from .trees import DecisionTree, RegressionTree

__all__ = [
    "CLASS_LABELS",
    "DEFAULT_HYPERPARAMETERS",
    "MODEL_KINDS",
    "N_CLASSES",
    "ClassifierSpec",
    "TrainedModel",
    "fit",
    "load_model",
    "save_model",
    "DecisionTree",
    "RegressionTree",
    "RandomForest",
    "AdaBoostSamme",
    "GradientBoostedTrees",
    "LinearSvmOvr",
    "MlpClassifier",
    "GaussianNaiveBayes",
    "KNearestNeighbors",
]

_ESTIMATORS = {
    "knn": KNearestNeighbors,
    "svm": LinearSvmOvr,
    "naive_bayes": GaussianNaiveBayes,
    "decision_tree": DecisionTree,
    "random_forest": RandomForest,
    "ada_boost": AdaBoostSamme,
    "gradient_boosted_trees": GradientBoostedTrees,
    "mlp": MlpClassifier,
}

# kinds whose fit() consumes the seeded RNG
_SEEDED = {"decision_tree", "random_forest", "ada_boost", "gradient_boosted_trees", "mlp"}


def fit(spec: ClassifierSpec, X, y) -> TrainedModel:
    """Train the classifier named by the spec; deterministic in (seed, data)."""
    if spec.kind not in _ESTIMATORS:
        raise ValueError(f"unknown model kind {spec.kind!r}; expected one of {MODEL_KINDS}")
    X, y = validate_training_data(X, y)
    params = spec.resolved_hyperparameters()
    estimator = _build(spec.kind, params)
    if spec.kind in _SEEDED:
        estimator.fit(X, y, rng=rng_from_seed(spec.seed))
    else:
        estimator.fit(X, y)
    return TrainedModel(spec=spec, estimator=estimator)


def _build(kind: str, params: dict):
    cls = _ESTIMATORS[kind]
    if kind == "decision_tree":
        return cls(min_samples_split=params["min_samples_split"])
    return cls(**params)


def load_model(path: str | Path) -> TrainedModel:
    """Rebuild a TrainedModel from its serialized JSON blob."""
    blob = load_blob(path)
    spec = ClassifierSpec(kind=blob["kind"], seed=blob["seed"],
                          hyperparameters=blob["hyperparameters"])
    estimator = _ESTIMATORS[blob["kind"]].from_state(blob["state"])
    return TrainedModel(spec=spec, estimator=estimator,
                        class_labels=tuple(blob["class_labels"]))
