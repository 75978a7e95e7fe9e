"""Imbalance-aware scoring for 4-class severity predictors.

Confusion matrix, support-weighted precision/recall/F1, per-class F1, the
multiclass correlation coefficient, one-vs-rest ROC and PR curves, and
support-weighted AUC. Per-class metrics with a zero denominator score 0 and
are flagged in the report.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, LabelOutOfRange

N_CLASSES = 4


def _as_labels(values, name: str) -> np.ndarray:
    arr = np.asarray(values)
    if arr.size == 0:
        raise EmptyInput(f"{name} is empty")
    arr = arr.astype(np.int64)
    if arr.min() < 0 or arr.max() >= N_CLASSES:
        raise LabelOutOfRange(f"{name} contains labels outside 0..{N_CLASSES - 1}")
    return arr


def confusion_matrix(y_true, y_pred) -> np.ndarray:
    """4x4 counts; rows are actual classes, columns predicted."""
    t = _as_labels(y_true, "y_true")
    p = _as_labels(y_pred, "y_pred")
    if len(t) != len(p):
        raise EmptyInput(f"{len(t)} true labels vs {len(p)} predictions")
    matrix = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(matrix, (t, p), 1)
    return matrix


def weighted_prf(y_true, y_pred) -> tuple[float, float, float, list[float]]:
    """Support-weighted precision/recall/F1 plus the per-class F1 list."""
    matrix = confusion_matrix(y_true, y_pred)
    n = matrix.sum()
    support = matrix.sum(axis=1)
    predicted = matrix.sum(axis=0)
    tp = np.diag(matrix)

    precision = np.where(predicted > 0, tp / np.maximum(predicted, 1), 0.0)
    recall = np.where(support > 0, tp / np.maximum(support, 1), 0.0)
    pr_sum = precision + recall
    f1 = np.where(pr_sum > 0, 2.0 * precision * recall / np.where(pr_sum > 0, pr_sum, 1.0), 0.0)

    weights = support / n
    return (
        float(np.sum(weights * precision)),
        float(np.sum(weights * recall)),
        float(np.sum(weights * f1)),
        [float(v) for v in f1],
    )


def mcc(y_true, y_pred) -> float:
    """Multiclass correlation coefficient (R_k over the confusion matrix).

    Reduces to (TP*TN - FP*FN)/sqrt(...) with two classes; defined as 0
    whenever either variance term vanishes (e.g. a constant predictor).
    """
    matrix = confusion_matrix(y_true, y_pred).astype(np.float64)
    s = matrix.sum()
    c = np.trace(matrix)
    t = matrix.sum(axis=1)  # actual counts
    p = matrix.sum(axis=0)  # predicted counts
    cov = c * s - float(np.dot(p, t))
    var_pred = s * s - float(np.dot(p, p))
    var_true = s * s - float(np.dot(t, t))
    if var_pred <= 0 or var_true <= 0:
        return 0.0
    return cov / math.sqrt(var_pred * var_true)


def roc_curve(y_true, scores, class_index: int) -> list[tuple[float, float]]:
    """One-vs-rest (FPR, TPR) points, one per distinct score threshold,
    sorted by FPR with the (0,0) and (1,1) endpoints included."""
    t = _as_labels(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    positive = t == class_index
    n_pos = int(positive.sum())
    n_neg = len(t) - n_pos

    points = [(0.0, 0.0)]
    for threshold in sorted(set(s.tolist()), reverse=True):
        predicted_pos = s >= threshold
        tp = int(np.sum(predicted_pos & positive))
        fp = int(np.sum(predicted_pos & ~positive))
        tpr = tp / n_pos if n_pos > 0 else 0.0
        fpr = fp / n_neg if n_neg > 0 else 0.0
        points.append((fpr, tpr))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    deduped = [points[0]]
    for pt in points[1:]:
        if pt != deduped[-1]:
            deduped.append(pt)
    return deduped


def curve_auc(points: list[tuple[float, float]]) -> float:
    """Trapezoidal area under a curve given as (x, y) points."""
    area = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        area += (x1 - x0) * (y0 + y1) / 2.0
    return area


def auc_weighted(y_true, proba_rows) -> float:
    """Support-weighted mean of one-vs-rest trapezoidal AUCs.

    Classes absent from y_true carry no weight (small test splits may miss
    a class entirely).
    """
    t = _as_labels(y_true, "y_true")
    proba = np.asarray(proba_rows, dtype=np.float64)
    if proba.ndim != 2 or proba.shape[0] != len(t):
        raise EmptyInput("probability rows do not match labels")
    total = 0.0
    weight_sum = 0.0
    for c in range(N_CLASSES):
        support = int(np.sum(t == c))
        if support == 0:
            continue
        auc = curve_auc(roc_curve(t, proba[:, c], c))
        total += support * auc
        weight_sum += support
    return total / weight_sum if weight_sum > 0 else 0.0


def pr_curve(y_true, scores, class_index: int) -> list[tuple[float, float]]:
    """One-vs-rest (recall, precision) points per distinct threshold,
    anchored at (0, 1)."""
    t = _as_labels(y_true, "y_true")
    s = np.asarray(scores, dtype=np.float64)
    positive = t == class_index
    n_pos = int(positive.sum())

    points = [(0.0, 1.0)]
    for threshold in sorted(set(s.tolist()), reverse=True):
        predicted_pos = s >= threshold
        tp = int(np.sum(predicted_pos & positive))
        n_pred = int(predicted_pos.sum())
        precision = tp / n_pred if n_pred > 0 else 0.0
        recall = tp / n_pos if n_pos > 0 else 0.0
        points.append((recall, precision))
    deduped = [points[0]]
    for pt in points[1:]:
        if pt != deduped[-1]:
            deduped.append(pt)
    return deduped


@dataclass(frozen=True)
class EvalReport:
    confusion: list[list[int]]
    precision_w: float
    recall_w: float
    f1_w: float
    f1_per_class: list[float]
    auc_w: float
    mcc: float
    roc_curves: dict[int, list[tuple[float, float]]]
    pr_curves: dict[int, list[tuple[float, float]]]
    per_class_auc: list[float]
    supports: list[int]
    prevalence: list[float]
    zero_division_classes: list[int]
    hyperparameters: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "confusion": self.confusion,
            "precision_weighted": self.precision_w,
            "recall_weighted": self.recall_w,
            "f1_weighted": self.f1_w,
            "f1_per_class": self.f1_per_class,
            "auc_weighted": self.auc_w,
            "mcc": self.mcc,
            "per_class_auc": self.per_class_auc,
            "supports": self.supports,
            "prevalence": self.prevalence,
            "zero_division_classes": self.zero_division_classes,
            "roc_curves": {str(k): [list(p) for p in v] for k, v in self.roc_curves.items()},
            "pr_curves": {str(k): [list(p) for p in v] for k, v in self.pr_curves.items()},
            "hyperparameters": self.hyperparameters,
            **self.extra,
        }


def report(y_true, y_pred, proba, hyperparameters: dict | None = None) -> EvalReport:
    """Assemble the full metric suite for one predictor's outputs."""
    t = _as_labels(y_true, "y_true")
    p = _as_labels(y_pred, "y_pred")
    proba = np.asarray(proba, dtype=np.float64)
    matrix = confusion_matrix(t, p)
    precision_w, recall_w, f1_w, f1_per_class = weighted_prf(t, p)

    supports = matrix.sum(axis=1)
    predicted = matrix.sum(axis=0)
    zero_div = [c for c in range(N_CLASSES) if supports[c] == 0 or predicted[c] == 0]

    roc_curves = {c: roc_curve(t, proba[:, c], c) for c in range(N_CLASSES)}
    pr_curves = {c: pr_curve(t, proba[:, c], c) for c in range(N_CLASSES)}
    per_class_auc = [curve_auc(roc_curves[c]) for c in range(N_CLASSES)]

    return EvalReport(
        confusion=matrix.tolist(),
        precision_w=precision_w,
        recall_w=recall_w,
        f1_w=f1_w,
        f1_per_class=f1_per_class,
        auc_w=auc_weighted(t, proba),
        mcc=mcc(t, p),
        roc_curves=roc_curves,
        pr_curves=pr_curves,
        per_class_auc=per_class_auc,
        supports=[int(s) for s in supports],
        prevalence=[float(s) / len(t) for s in supports],
        zero_division_classes=zero_div,
        hyperparameters=hyperparameters,
    )
