"""Metric formulas checked against hand-worked values and scikit-learn."""

from __future__ import annotations

import numpy as np
import pytest
from sklearn.metrics import (
    accuracy_score,
    f1_score,
    mean_absolute_error,
    precision_score,
    recall_score,
)

from newsleaning.errors import DimensionMismatch, EmptyTestSet
from newsleaning.metrics import MetricsReport, confusion_matrix


def test_confusion_matrix_counts() -> None:
    y_true = [0, 0, 1, 2, 2, 2]
    y_pred = [0, 1, 1, 2, 0, 2]
    cm = confusion_matrix(y_true, y_pred)
    expected = np.array([[1, 1, 0], [0, 1, 0], [1, 0, 2]])
    assert np.array_equal(cm, expected)


def test_report_matches_hand_computation() -> None:
    # worked by hand from the confusion matrix above
    report = MetricsReport.from_predictions([0, 0, 1, 2, 2, 2], [0, 1, 1, 2, 0, 2])
    assert report.accuracy == pytest.approx(4 / 6)
    assert report.precision == pytest.approx((0.5 + 0.5 + 1.0) / 3)
    assert report.recall == pytest.approx((0.5 + 1.0 + 2 / 3) / 3)
    assert report.macro_f1 == pytest.approx((0.5 + 2 / 3 + 0.8) / 3)
    assert report.mae == pytest.approx(0.5)
    assert report.n_test == 6


def test_zero_division_yields_zero_not_nan() -> None:
    # class 1 never predicted and never true: its precision/recall/F1 are 0
    report = MetricsReport.from_predictions([0, 0, 2, 2], [2, 2, 0, 0])
    assert report.accuracy == 0.0
    assert np.isfinite(report.precision)
    assert np.isfinite(report.recall)
    assert np.isfinite(report.macro_f1)
    assert report.macro_f1 == 0.0


def test_constant_predictions_stay_finite() -> None:
    report = MetricsReport.from_predictions([0, 1, 2, 1], [1, 1, 1, 1])
    assert np.isfinite([report.precision, report.recall, report.macro_f1]).all()
    assert report.accuracy == pytest.approx(0.5)


def test_agrees_with_sklearn_on_random_labels() -> None:
    rng = np.random.default_rng(42)
    for _ in range(25):
        y_true = rng.integers(0, 3, size=80)
        y_pred = rng.integers(0, 3, size=80)
        report = MetricsReport.from_predictions(y_true, y_pred)
        assert report.accuracy == pytest.approx(accuracy_score(y_true, y_pred))
        assert report.precision == pytest.approx(
            precision_score(y_true, y_pred, average="macro",
                            labels=[0, 1, 2], zero_division=0))
        assert report.recall == pytest.approx(
            recall_score(y_true, y_pred, average="macro",
                         labels=[0, 1, 2], zero_division=0))
        assert report.macro_f1 == pytest.approx(
            f1_score(y_true, y_pred, average="macro",
                     labels=[0, 1, 2], zero_division=0))
        assert report.mae == pytest.approx(mean_absolute_error(y_true, y_pred))


def test_mae_recovered_from_confusion_alone() -> None:
    y_true = [0, 2, 2, 1, 0, 1, 2]
    y_pred = [2, 0, 1, 1, 0, 0, 2]
    direct = MetricsReport.from_predictions(y_true, y_pred)
    via_cm = MetricsReport.from_confusion(confusion_matrix(y_true, y_pred))
    assert via_cm.mae == pytest.approx(direct.mae)
    assert via_cm == direct


def test_mae_bounded_by_ordinal_range() -> None:
    report = MetricsReport.from_predictions([0, 0, 0], [2, 2, 2])
    assert report.mae == pytest.approx(2.0)


def test_empty_inputs_rejected() -> None:
    with pytest.raises(EmptyTestSet):
        MetricsReport.from_predictions([], [])
    with pytest.raises(EmptyTestSet):
        MetricsReport.from_confusion(np.zeros((3, 3), dtype=int))


def test_shape_errors() -> None:
    with pytest.raises(DimensionMismatch):
        confusion_matrix([0, 1], [0])
    with pytest.raises(DimensionMismatch):
        MetricsReport.from_confusion(np.zeros((2, 2), dtype=int))
    with pytest.raises(ValueError):
        confusion_matrix([0, 3], [0, 1])
