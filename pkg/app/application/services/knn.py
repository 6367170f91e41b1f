"""k-nearest-neighbour classification over a labeled dataset."""

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from app.application.services.dataset import LabeledDataset, LearnError


def nearest_rows(train: LabeledDataset, k: int, features: Mapping[str, float]) -> np.ndarray:
    """Indices of the k nearest rows by Euclidean distance, ties to the lower index."""
    if not 1 <= k <= len(train):
        raise LearnError(f"k must be in [1, {len(train)}], got {k}")
    query = train.vector(features)
    distances = np.sqrt(((train.X - query) ** 2).sum(axis=1))
    return np.argsort(distances, kind="stable")[:k]


def knn_predict(train: LabeledDataset, k: int, features: Mapping[str, float]) -> int:
    """Majority label among the k nearest rows; a tied vote is 0."""
    votes = train.y[nearest_rows(train, k, features)]
    positives = int(votes.sum())
    return 1 if positives > k - positives else 0


def knn_proba(train: LabeledDataset, k: int, features: Mapping[str, float]) -> float:
    """Positive share of the k nearest rows."""
    return float(train.y[nearest_rows(train, k, features)].mean())


@dataclass(frozen=True)
class KnnModel:
    """Stored training rows plus k."""

    train: LabeledDataset
    k: int

    def predict(self, features: Mapping[str, float]) -> int:
        return knn_predict(self.train, self.k, features)

    def predict_proba(self, features: Mapping[str, float]) -> float:
        return knn_proba(self.train, self.k, features)

    def to_dict(self) -> dict[str, Any]:
        return {
            "k": self.k,
            "feature_names": list(self.train.feature_names),
            "X": self.train.X.tolist(),
            "y": self.train.y.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "KnnModel":
        names = list(data["feature_names"])
        X = np.asarray(data["X"], dtype=float).reshape(len(data["y"]), len(names))
        train = LabeledDataset(tuple(names), X, np.asarray(data["y"], dtype=int))
        return cls(train=train, k=int(data["k"]))
