"""Threshold-free and thresholded detection metrics; label 1 (anomalous) is positive."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class MetricsRecord:
    auc: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def _pair(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=float).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if scores.size != labels.size:
        raise ValueError(f"{scores.size} scores but {labels.size} labels")
    if not np.isin(labels, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return scores, labels.astype(int)


def roc_auc(scores, labels) -> float:
    """Mann-Whitney estimate of the ROC area; ties get midranks."""
    scores, labels = _pair(scores, labels)
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC AUC needs both classes present")
    ranks = rankdata(scores, method="average")
    return float((ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg))


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def threshold_metrics(scores, labels, tau: float) -> MetricsRecord:
    """Confusion counts for the rule ``anomalous iff score > tau``.

    Precision is undefined when nothing is flagged; F1 is undefined when
    precision is undefined or precision + recall is zero.
    """
    scores, labels = _pair(scores, labels)
    flagged = scores > tau
    positive = labels == 1
    tp = int(np.sum(flagged & positive))
    fp = int(np.sum(flagged & ~positive))
    tn = int(np.sum(~flagged & ~positive))
    fn = int(np.sum(~flagged & positive))
    precision = _ratio(tp, tp + fp)
    recall = _ratio(tp, tp + fn)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    auc = roc_auc(scores, labels) if 0 < positive.sum() < labels.size else None
    accuracy = (tp + tn) / labels.size if labels.size else 0.0
    return MetricsRecord(auc, precision, recall, f1, accuracy, tp, fp, tn, fn)
