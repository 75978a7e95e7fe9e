"""Classifier contracts: documented examples, determinism, serialization."""

from __future__ import annotations

import numpy as np
import pytest

from sevkit.classifiers import (
    ClassifierSpec,
    MODEL_KINDS,
    fit,
    load_model,
    save_model,
)
from sevkit.classifiers.ensembles import RandomForest
from sevkit.classifiers.trees import DecisionTree
from sevkit.errors import (
    DimensionMismatch,
    LabelOutOfRange,
    NonFiniteFeature,
    UnfittedModel,
)
from sevkit.evaluation import mcc as mcc_score


def blob_dataset(seed=0, per_class=200, separation=5.0):
    """4-class Gaussian blobs, unit sigma, staircase centers.

    Adjacent centers sit exactly `separation` apart, which is also the
    minimum pairwise distance.
    """
    rng = np.random.RandomState(seed)
    s = separation
    centers = [(0.0, 0.0), (s, 0.0), (s, s), (2 * s, s)]
    X, y = [], []
    for c, center in enumerate(centers):
        X.append(rng.normal(0.0, 1.0, size=(per_class, 2)) + np.asarray(center))
        y.append(np.full(per_class, c))
    return np.vstack(X), np.concatenate(y)


@pytest.fixture(scope="module")
def blobs():
    X, y = blob_dataset(seed=0)
    rng = np.random.RandomState(1)
    order = rng.permutation(len(y))
    cut = int(0.8 * len(y))
    return (X[order[:cut]], y[order[:cut]], X[order[cut:]], y[order[cut:]])


class TestValidation:
    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            fit(ClassifierSpec("knn"), np.zeros((4, 2)), np.zeros(3, dtype=int))

    def test_non_finite(self):
        X = np.zeros((4, 2))
        X[0, 0] = np.nan
        with pytest.raises(NonFiniteFeature):
            fit(ClassifierSpec("knn"), X, np.array([0, 1, 2, 3]))

    def test_label_out_of_range(self):
        with pytest.raises(LabelOutOfRange):
            fit(ClassifierSpec("knn"), np.zeros((4, 2)), np.array([0, 1, 2, 4]))

    def test_too_few_samples(self):
        with pytest.raises(DimensionMismatch):
            fit(ClassifierSpec("knn"), np.zeros((3, 2)), np.array([0, 1, 2]))

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            fit(ClassifierSpec("logreg"), np.zeros((4, 2)), np.array([0, 1, 2, 3]))


class TestExamples:
    def test_knn_stores_data_verbatim(self):
        X = np.arange(12, dtype=float).reshape(6, 2)
        y = np.array([0, 1, 2, 3, 0, 1])
        model = fit(ClassifierSpec("knn"), X, y)
        assert np.array_equal(model.estimator.X, X)
        assert np.array_equal(model.estimator.y, y)

    def test_knn_k1_memorizes(self):
        X = np.arange(8, dtype=float).reshape(4, 2) * 3
        y = np.array([0, 1, 2, 3])
        model = fit(ClassifierSpec("knn", hyperparameters={"k": 1}), X, y)
        proba = model.predict_proba(X)
        assert np.allclose(proba, np.eye(4))

    def test_tree_shatters_separable_set(self):
        rng = np.random.RandomState(7)
        X = rng.uniform(-1, 1, size=(40, 2))
        y = (X[:, 0] > 0).astype(int) + 2 * (X[:, 1] > 0).astype(int)
        model = fit(ClassifierSpec("decision_tree"), X, y)
        assert np.array_equal(model.predict(X), y)

    def test_gaussian_nb_midpoint(self):
        # one feature, class 0 at {-1,-1}, class 1 at {+1,+1}: x=0 is a coin flip
        X = np.array([[-1.0], [-1.0], [1.0], [1.0]])
        y = np.array([0, 0, 1, 1])
        model = fit(ClassifierSpec("naive_bayes"), X, y)
        proba = model.predict_proba(np.array([[0.0]]))[0]
        assert proba[0] == pytest.approx(0.5, abs=1e-9)
        assert proba[1] == pytest.approx(0.5, abs=1e-9)

    def test_forest_probability_is_mean_of_trees(self):
        rng = np.random.RandomState(2)
        X = rng.normal(size=(30, 3))
        y = rng.randint(0, 4, size=30)
        spec = ClassifierSpec("random_forest", seed=5, hyperparameters={"n_trees": 2})
        model = fit(spec, X, y)
        probe = rng.normal(size=(6, 3))
        members = model.estimator.trees
        expected = (members[0].predict_proba(probe) + members[1].predict_proba(probe)) / 2
        assert np.allclose(model.predict_proba(probe), expected)

    def test_ada_boost_single_stage_equals_stump(self):
        rng = np.random.RandomState(3)
        X = rng.normal(size=(50, 2))
        y = (X[:, 0] > 0).astype(int)
        spec = ClassifierSpec("ada_boost", hyperparameters={"n_stages": 1})
        model = fit(spec, X, y)
        stump = model.estimator.stumps[0]
        assert len(model.estimator.stumps) == 1
        probe = rng.normal(size=(20, 2))
        assert np.array_equal(model.predict(probe), stump.predict(probe))

    def test_mlp_loss_decreases(self, blobs):
        X_train, y_train, _, _ = blobs
        model = fit(ClassifierSpec("mlp", seed=4), X_train, y_train)
        losses = model.estimator.loss_history
        assert losses[9] < losses[0]


class TestContracts:
    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_proba_rows_sum_to_one(self, kind, blobs):
        X_train, y_train, X_test, _ = blobs
        model = fit(ClassifierSpec(kind, seed=11), X_train[:80], y_train[:80])
        proba = model.predict_proba(X_test[:20])
        assert proba.shape == (20, 4)
        assert np.all(proba >= 0)
        assert np.allclose(proba.sum(axis=1), 1.0, atol=1e-9)

    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_deterministic_refit(self, kind, blobs):
        X_train, y_train, X_test, _ = blobs
        a = fit(ClassifierSpec(kind, seed=21), X_train[:80], y_train[:80])
        b = fit(ClassifierSpec(kind, seed=21), X_train[:80], y_train[:80])
        assert np.array_equal(a.predict_proba(X_test[:20]), b.predict_proba(X_test[:20]))

    @pytest.mark.parametrize("kind", ["knn", "naive_bayes"])
    def test_row_permutation_invariance(self, kind, blobs):
        X_train, y_train, X_test, _ = blobs
        X, y = X_train[:60], y_train[:60]
        perm = np.random.RandomState(0).permutation(60)
        a = fit(ClassifierSpec(kind, seed=1), X, y)
        b = fit(ClassifierSpec(kind, seed=1), X[perm], y[perm])
        assert np.allclose(a.predict_proba(X_test[:20]), b.predict_proba(X_test[:20]), atol=1e-9)

    def test_predict_is_argmax_lowest_index_ties(self):
        X = np.array([[-1.0], [-1.0], [1.0], [1.0], [-1.0], [1.0]])
        y = np.array([0, 0, 1, 1, 0, 1])
        model = fit(ClassifierSpec("naive_bayes"), X, y)
        # symmetric point: equal probability for 0 and 1 -> predict 0
        assert model.predict(np.array([[0.0]]))[0] == 0

    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_serialization_round_trip(self, tmp_path, kind, blobs):
        X_train, y_train, X_test, _ = blobs
        spec = ClassifierSpec(kind, seed=13,
                              hyperparameters=_small_hyperparameters(kind))
        model = fit(spec, X_train[:60], y_train[:60])
        path = tmp_path / f"{kind}.json"
        save_model(model, path)
        loaded = load_model(path)
        assert np.allclose(model.predict_proba(X_test[:20]),
                           loaded.predict_proba(X_test[:20]), atol=1e-12)

    def test_load_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"format": "something-else"}')
        with pytest.raises(UnfittedModel):
            load_model(path)


def _small_hyperparameters(kind: str) -> dict:
    return {
        "svm": {"epochs": 50},
        "random_forest": {"n_trees": 5},
        "ada_boost": {"n_stages": 5},
        "gradient_boosted_trees": {"n_rounds": 5},
        "mlp": {"epochs": 10},
    }.get(kind, {})


class TestBlobAccuracy:
    """Every model must clearly beat the majority baseline on separated blobs."""

    @pytest.mark.parametrize("kind", MODEL_KINDS)
    def test_blob_mcc(self, kind, blobs):
        X_train, y_train, X_test, y_test = blobs
        model = fit(ClassifierSpec(kind, seed=7), X_train, y_train)
        pred = model.predict(X_test)
        accuracy = float(np.mean(pred == y_test))
        assert accuracy >= 0.95, f"{kind} accuracy {accuracy:.3f}"
        assert mcc_score(y_test, pred) > 0.9, kind


class TestTreeInternals:
    def test_regression_tree_fits_constant(self):
        from sevkit.classifiers.trees import RegressionTree
        X = np.arange(10, dtype=float).reshape(-1, 1)
        tree = RegressionTree(max_depth=2).fit(X, np.full(10, 3.5))
        assert np.allclose(tree.predict(X), 3.5)

    def test_tree_respects_depth(self):
        rng = np.random.RandomState(0)
        X = rng.normal(size=(100, 2))
        y = rng.randint(0, 4, size=100)
        stump = DecisionTree(max_depth=1)
        stump.fit(X, y)
        # depth-1: at most root + two leaves
        assert len(stump.nodes) <= 3
