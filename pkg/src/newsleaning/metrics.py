"""Evaluation metrics for the three-way leaning task.

All metrics are derived from the 3x3 confusion matrix (rows = true label,
columns = predicted label).  Macro averages weight the three classes equally
and any division by zero yields 0 rather than NaN, so degenerate predictions
still produce finite, comparable numbers.  Because the labels are ordinal,
mean absolute error over the codes is reported as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptyTestSet

N_CLASSES = 3


def confusion_matrix(y_true: Sequence[int], y_pred: Sequence[int]) -> np.ndarray:
    """Count (true, predicted) pairs into a 3x3 integer matrix."""
    t = np.asarray(y_true, dtype=np.int64)
    p = np.asarray(y_pred, dtype=np.int64)
    if t.shape != p.shape or t.ndim != 1:
        raise DimensionMismatch(
            f"label arrays must be 1-D and equal length, got {t.shape} and {p.shape}")
    if t.size == 0:
        raise EmptyTestSet("cannot build a confusion matrix from zero predictions")
    if ((t < 0) | (t >= N_CLASSES) | (p < 0) | (p >= N_CLASSES)).any():
        raise ValueError("labels must be integer codes in {0, 1, 2}")
    cm = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
    np.add.at(cm, (t, p), 1)
    return cm


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


@dataclass(frozen=True)
class MetricsReport:
    """Scores for one evaluation run."""

    accuracy: float
    precision: float
    recall: float
    macro_f1: float
    mae: float
    confusion: tuple[tuple[int, ...], ...]
    n_test: int

    @classmethod
    def from_confusion(cls, cm: np.ndarray,
                       mae: float | None = None) -> "MetricsReport":
        cm = np.asarray(cm, dtype=np.int64)
        if cm.shape != (N_CLASSES, N_CLASSES):
            raise DimensionMismatch(f"confusion matrix must be 3x3, got {cm.shape}")
        total = int(cm.sum())
        if total == 0:
            raise EmptyTestSet("confusion matrix holds zero predictions")
        accuracy = float(np.trace(cm)) / total

        precisions, recalls, f1s = [], [], []
        for c in range(N_CLASSES):
            tp = float(cm[c, c])
            prec = _safe_div(tp, float(cm[:, c].sum()))
            rec = _safe_div(tp, float(cm[c, :].sum()))
            precisions.append(prec)
            recalls.append(rec)
            f1s.append(_safe_div(2.0 * prec * rec, prec + rec))

        if mae is None:
            # |true - pred| is recoverable from the matrix alone
            dist = sum(
                abs(i - j) * int(cm[i, j])
                for i in range(N_CLASSES) for j in range(N_CLASSES)
            )
            mae = dist / total
        return cls(
            accuracy=accuracy,
            precision=float(np.mean(precisions)),
            recall=float(np.mean(recalls)),
            macro_f1=float(np.mean(f1s)),
            mae=float(mae),
            confusion=tuple(tuple(int(v) for v in row) for row in cm),
            n_test=total,
        )

    @classmethod
    def from_predictions(cls, y_true: Sequence[int],
                         y_pred: Sequence[int]) -> "MetricsReport":
        return cls.from_confusion(confusion_matrix(y_true, y_pred))

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "macro_f1": self.macro_f1,
            "mae": self.mae,
            "confusion": [list(row) for row in self.confusion],
            "n_test": self.n_test,
        }
