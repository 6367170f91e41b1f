"""Labeled feature tables, train/test splitting, class rebalancing and K-fold CV."""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from sklearn.model_selection import KFold, train_test_split
from sklearn.utils import resample

logger = logging.getLogger(__name__)


class LearnError(Exception):
    """Raised when a dataset or model cannot be trained or applied."""

    pass


@dataclass(frozen=True)
class LabeledDataset:
    """Rows of named numeric features with binary labels."""

    feature_names: tuple[str, ...]
    X: np.ndarray  # (n_rows, n_features) float64
    y: np.ndarray  # (n_rows,) int in {0, 1}
    positive_label_name: str = "positive"
    row_ids: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[1] != len(self.feature_names):
            raise LearnError(
                f"Feature matrix shape {self.X.shape} does not match "
                f"{len(self.feature_names)} feature names"
            )
        if self.y.shape != (self.X.shape[0],):
            raise LearnError(f"Got {self.y.shape[0]} labels for {self.X.shape[0]} rows")
        if self.row_ids and len(self.row_ids) != self.X.shape[0]:
            raise LearnError("row_ids length must match the number of rows")

    @classmethod
    def from_rows(
        cls,
        feature_names: Sequence[str],
        rows: Sequence[tuple[Sequence[float], int]],
        positive_label_name: str = "positive",
        row_ids: Sequence[str] = (),
    ) -> "LabeledDataset":
        """Build from (feature vector, label) pairs."""
        X = np.array([list(v) for v, _ in rows], dtype=float).reshape(len(rows), len(feature_names))
        y = np.array([int(label) for _, label in rows], dtype=int)
        return cls(tuple(feature_names), X, y, positive_label_name, tuple(row_ids))

    def __len__(self) -> int:
        return self.X.shape[0]

    @property
    def n_positive(self) -> int:
        return int(self.y.sum())

    @property
    def n_negative(self) -> int:
        return len(self) - self.n_positive

    def subset(self, indices: Sequence[int] | np.ndarray) -> "LabeledDataset":
        """Rows at the given positions, in the given order."""
        idx = np.asarray(indices, dtype=int)
        ids = tuple(self.row_ids[i] for i in idx) if self.row_ids else ()
        return LabeledDataset(
            self.feature_names, self.X[idx], self.y[idx], self.positive_label_name, ids
        )

    def vector(self, features: Mapping[str, float]) -> np.ndarray:
        """Order a named vector by feature_names; missing features are 0."""
        return np.array([float(features.get(n, 0.0)) for n in self.feature_names])

    def row_features(self, i: int) -> dict[str, float]:
        return dict(zip(self.feature_names, self.X[i].tolist()))


def _require_both_classes(ds: LabeledDataset) -> None:
    if ds.n_positive == 0 or ds.n_negative == 0:
        raise LearnError(
            f"Both classes required, got {ds.n_positive} positive / {ds.n_negative} negative"
        )


def split_train_test(
    ds: LabeledDataset, test_fraction: float, seed: int
) -> tuple[LabeledDataset, LabeledDataset]:
    """Random split with test size = round-half-up(test_fraction x n), no stratification."""
    if not 0 < test_fraction < 1:
        raise LearnError(f"test_fraction must be in (0, 1), got {test_fraction}")

    n = len(ds)
    n_test = math.floor(test_fraction * n + 0.5)
    if n_test in (0, n):
        raise LearnError(f"Split of {n} rows at {test_fraction} leaves an empty side")

    train_idx, test_idx = train_test_split(
        np.arange(n), test_size=n_test, random_state=seed, shuffle=True
    )
    return ds.subset(np.sort(train_idx)), ds.subset(np.sort(test_idx))


def undersample(ds: LabeledDataset, seed: int) -> LabeledDataset:
    """Downsample the majority class without replacement to the minority count."""
    _require_both_classes(ds)
    pos = np.flatnonzero(ds.y == 1)
    neg = np.flatnonzero(ds.y == 0)
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)

    kept = resample(majority, replace=False, n_samples=len(minority), random_state=seed)
    indices = np.sort(np.concatenate([minority, kept]))
    logger.debug(f"Undersampled {len(ds)} -> {len(indices)} rows")
    return ds.subset(indices)


def oversample(ds: LabeledDataset, seed: int) -> LabeledDataset:
    """Resample the minority class with replacement up to the majority count.

    Original minority rows are all kept; only duplicates are added.
    """
    _require_both_classes(ds)
    pos = np.flatnonzero(ds.y == 1)
    neg = np.flatnonzero(ds.y == 0)
    minority, majority = (pos, neg) if len(pos) <= len(neg) else (neg, pos)

    extra_count = len(majority) - len(minority)
    extra = (
        resample(minority, replace=True, n_samples=extra_count, random_state=seed)
        if extra_count
        else np.array([], dtype=int)
    )
    indices = np.concatenate([np.sort(np.concatenate([minority, majority])), extra])
    logger.debug(f"Oversampled {len(ds)} -> {len(indices)} rows")
    return ds.subset(indices)


@dataclass
class CrossValidationResult:
    """Per-fold and mean accuracy."""

    fold_accuracies: list[float]

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.fold_accuracies))

    def to_dict(self) -> dict:
        return {"folds": self.fold_accuracies, "mean_accuracy": self.mean_accuracy}


def cross_validate(
    ds: LabeledDataset,
    folds: int,
    fit_predict: Callable[[LabeledDataset, LabeledDataset], Sequence[int]],
    seed: int,
) -> CrossValidationResult:
    """K-fold accuracy over contiguous blocks of a seeded shuffle.

    Args:
        ds: Dataset to fold
        folds: Number of folds (>= 2)
        fit_predict: Trains on the first dataset, returns labels for the second
        seed: Shuffle seed
    """
    if folds < 2 or folds > len(ds):
        raise LearnError(f"Cannot run {folds}-fold CV on {len(ds)} rows")

    accuracies: list[float] = []
    splitter = KFold(n_splits=folds, shuffle=True, random_state=seed)
    for train_idx, test_idx in splitter.split(ds.X):
        train, test = ds.subset(train_idx), ds.subset(test_idx)
        predicted = np.asarray(fit_predict(train, test), dtype=int)
        accuracies.append(float(np.mean(predicted == test.y)))

    logger.info(f"{folds}-fold CV mean accuracy {np.mean(accuracies):.4f}")
    return CrossValidationResult(fold_accuracies=accuracies)
