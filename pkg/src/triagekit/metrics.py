"""Classification metrics and threshold-sweep curves.

Scalar metrics follow the usual confusion-matrix formulas; curves sweep
every distinct score descending. ROC AUC is trapezoidal (tied scores
advance TP and FP together, giving a diagonal segment); PR AUC uses step
interpolation, which avoids the optimism of trapezoids between recall
levels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MetricError


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricsReport:
    """Scalar metrics; a field is None when its denominator is zero."""

    accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f_score: Optional[float]
    specificity: Optional[float]
    npv: Optional[float]
    confusion: ConfusionMatrix

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f_score": self.f_score,
            "specificity": self.specificity,
            "npv": self.npv,
            "tp": self.confusion.tp,
            "fp": self.confusion.fp,
            "tn": self.confusion.tn,
            "fn": self.confusion.fn,
        }


@dataclass(frozen=True)
class Curve:
    kind: str  # "ROC" or "PR"
    thresholds: tuple
    points: tuple  # (x, y) pairs; ROC: (FPR, TPR), PR: (recall, precision)
    auc: float


def _check_binary(labels) -> np.ndarray:
    arr = np.asarray(labels)
    if not np.isin(arr, (0, 1)).all():
        raise MetricError("labels must be 0/1")
    return arr.astype(np.int64)


def confusion(labels, predicted_labels) -> ConfusionMatrix:
    y = _check_binary(labels)
    p = _check_binary(predicted_labels)
    if y.shape != p.shape:
        raise MetricError(
            f"length mismatch: {y.shape[0]} labels vs {p.shape[0]} predictions"
        )
    tp = int(np.sum((y == 1) & (p == 1)))
    fp = int(np.sum((y == 0) & (p == 1)))
    tn = int(np.sum((y == 0) & (p == 0)))
    fn = int(np.sum((y == 1) & (p == 0)))
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def scalar_metrics(cm: ConfusionMatrix) -> MetricsReport:
    accuracy = _ratio(cm.tp + cm.tn, cm.total)
    precision = _ratio(cm.tp, cm.tp + cm.fp)
    recall = _ratio(cm.tp, cm.tp + cm.fn)
    specificity = _ratio(cm.tn, cm.tn + cm.fp)
    npv = _ratio(cm.tn, cm.tn + cm.fn)
    if precision is None or recall is None or precision + recall == 0:
        f_score = None
    else:
        f_score = 2 * precision * recall / (precision + recall)
    return MetricsReport(
        accuracy=accuracy,
        precision=precision,
        recall=recall,
        f_score=f_score,
        specificity=specificity,
        npv=npv,
        confusion=cm,
    )


def _sweep(labels, scores):
    """Cumulative TP/FP after each distinct score threshold, descending."""
    y = _check_binary(labels)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape:
        raise MetricError("labels and scores differ in length")
    if not np.isfinite(s).all():
        raise MetricError("scores contain non-finite values")
    order = np.argsort(-s, kind="stable")
    s = s[order]
    y = y[order]
    # last index of each tied-score block
    distinct = np.nonzero(np.diff(s))[0]
    block_end = np.r_[distinct, s.size - 1]
    ctp = np.cumsum(y)[block_end]
    cfp = np.cumsum(1 - y)[block_end]
    return s[block_end], ctp, cfp, int(y.sum()), int((1 - y).sum())


def roc_curve(labels, scores) -> Curve:
    thresholds, ctp, cfp, n_pos, n_neg = _sweep(labels, scores)
    if n_pos == 0 or n_neg == 0:
        raise MetricError("ROC curve requires both classes present")
    tpr = np.r_[0.0, ctp / n_pos]
    fpr = np.r_[0.0, cfp / n_neg]
    trapezoid = getattr(np, "trapezoid", None) or np.trapz
    auc = float(trapezoid(tpr, fpr))
    points = tuple(zip(fpr.tolist(), tpr.tolist()))
    return Curve(kind="ROC", thresholds=tuple(thresholds.tolist()), points=points, auc=auc)


def pr_curve(labels, scores) -> Curve:
    thresholds, ctp, cfp, n_pos, _ = _sweep(labels, scores)
    if n_pos == 0:
        raise MetricError("PR curve requires at least one positive label")
    recall = ctp / n_pos
    precision = ctp / (ctp + cfp)
    # step rule: precision achieved at each new recall level covers the gap
    auc = float(np.sum(np.diff(np.r_[0.0, recall]) * precision))
    points = tuple(zip(recall.tolist(), precision.tolist()))
    return Curve(kind="PR", thresholds=tuple(thresholds.tolist()), points=points, auc=auc)


def evaluate_scores(labels, scores, threshold: float = 0.5):
    """Scalar report at a threshold plus both curves."""
    y = _check_binary(labels)
    s = np.asarray(scores, dtype=np.float64)
    cm = confusion(y, (s >= threshold).astype(np.int64))
    return scalar_metrics(cm), roc_curve(y, s), pr_curve(y, s)
