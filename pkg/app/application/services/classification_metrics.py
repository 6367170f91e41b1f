"""Confusion matrices, derived rates and AUROC for binary classifiers."""

from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.stats import rankdata
from sklearn.metrics import confusion_matrix


class MetricsError(Exception):
    """Raised when metrics cannot be computed from the given labels or scores."""

    pass


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are actual classes, columns predicted; label 1 is positive."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def to_dict(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


@dataclass(frozen=True)
class DerivedRates:
    """Rates from a confusion matrix; None where the denominator is zero."""

    accuracy: float | None
    sensitivity: float | None
    specificity: float | None
    fpr: float | None
    fnr: float | None

    def to_dict(self) -> dict[str, float | None]:
        return {
            "accuracy": self.accuracy,
            "sensitivity": self.sensitivity,
            "specificity": self.specificity,
            "fpr": self.fpr,
            "fnr": self.fnr,
        }


def confusion(predicted: Sequence[int], actual: Sequence[int]) -> ConfusionMatrix:
    """Count predicted-vs-actual pairs.

    Raises:
        MetricsError: If the sequences are empty or differ in length
    """
    if len(predicted) != len(actual):
        raise MetricsError(f"Got {len(predicted)} predictions for {len(actual)} labels")
    if len(actual) == 0:
        raise MetricsError("Cannot build a confusion matrix from no labels")
    tn, fp, fn, tp = confusion_matrix(
        np.asarray(actual, dtype=int), np.asarray(predicted, dtype=int), labels=[0, 1]
    ).ravel()
    return ConfusionMatrix(tp=int(tp), fp=int(fp), fn=int(fn), tn=int(tn))


def _ratio(num: int, den: int) -> float | None:
    return num / den if den else None


def derive(cm: ConfusionMatrix) -> DerivedRates:
    return DerivedRates(
        accuracy=_ratio(cm.tp + cm.tn, cm.total),
        sensitivity=_ratio(cm.tp, cm.tp + cm.fn),
        specificity=_ratio(cm.tn, cm.tn + cm.fp),
        fpr=_ratio(cm.fp, cm.fp + cm.tn),
        fnr=_ratio(cm.fn, cm.tp + cm.fn),
    )


def auroc(scores: Sequence[float], actual: Sequence[int]) -> float:
    """Mann-Whitney U over (n_pos x n_neg); tied scores count one half.

    Raises:
        MetricsError: On length mismatch or when only one class is present
    """
    if len(scores) != len(actual):
        raise MetricsError(f"Got {len(scores)} scores for {len(actual)} labels")
    y = np.asarray(actual, dtype=int)
    n_pos = int((y == 1).sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise MetricsError("AUROC needs both classes")

    ranks = rankdata(np.asarray(scores, dtype=float), method="average")
    u = ranks[y == 1].sum() - n_pos * (n_pos + 1) / 2
    return float(u / (n_pos * n_neg))


def metrics_report(
    predicted: Sequence[int], actual: Sequence[int], scores: Sequence[float] | None = None
) -> dict[str, Any]:
    """{matrix, accuracy, sensitivity, specificity, fpr, fnr, auroc?}.

    AUROC is omitted when no scores are given or only one class is present.
    """
    cm = confusion(predicted, actual)
    report: dict[str, Any] = {"matrix": cm.to_dict(), **derive(cm).to_dict()}
    if scores is not None and 0 < sum(1 for a in actual if a == 1) < len(actual):
        report["auroc"] = auroc(scores, actual)
    return report
