"""Bagged CART forests, probability scores and Gini variable importance."""

import logging
import math
from collections import defaultdict
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any

import numpy as np

from app.application.services.dataset import LabeledDataset, LearnError
from app.application.services.decision_tree import (
    CartParams,
    DecisionTree,
    fit_tree,
    gini,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Forest:
    """Trees trained on bootstraps of one dataset; tree i is seeded with seed + i."""

    trees: tuple[DecisionTree, ...]
    seed: int
    mtry: int
    oob_indices: tuple[tuple[int, ...], ...]
    feature_names: tuple[str, ...]

    def oob_accuracy(self, ds: LabeledDataset) -> float | None:
        """Accuracy of out-of-bag majority votes on the training rows.

        Rows that landed in every bootstrap are skipped; None if no row is out of bag.
        """
        votes: dict[int, list[float]] = defaultdict(list)
        for tree, oob in zip(self.trees, self.oob_indices):
            for i in oob:
                votes[i].append(tree.leaf_for(ds.row_features(i)).positive_fraction)
        if not votes:
            return None
        correct = sum(
            int((1 if float(np.mean(scores)) > 0.5 else 0) == int(ds.y[i]))
            for i, scores in votes.items()
        )
        return correct / len(votes)

    def to_dict(self) -> dict[str, Any]:
        return {
            "feature_names": list(self.feature_names),
            "seed": self.seed,
            "mtry": self.mtry,
            "oob_indices": [list(o) for o in self.oob_indices],
            "trees": [t.root.to_dict() for t in self.trees],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Forest":
        names = tuple(data["feature_names"])
        return cls(
            trees=tuple(
                DecisionTree.from_dict({"feature_names": names, "root": root})
                for root in data["trees"]
            ),
            seed=int(data["seed"]),
            mtry=int(data["mtry"]),
            oob_indices=tuple(tuple(int(i) for i in o) for o in data["oob_indices"]),
            feature_names=names,
        )


def default_mtry(n_features: int) -> int:
    """floor(sqrt(p)), at least 1."""
    return max(1, math.isqrt(n_features))


def train_forest(
    ds: LabeledDataset,
    n_trees: int,
    mtry: int | None = None,
    params: CartParams | None = None,
    seed: int = 42,
    bootstrap: bool = True,
    jobs: int = 1,
) -> Forest:
    """Train a random forest.

    Args:
        ds: Training rows
        n_trees: Number of trees (>= 1)
        mtry: Candidate features per split (default floor(sqrt(p)))
        params: Per-tree stopping rules
        seed: Base seed; tree i draws its bootstrap and splits from seed + i, so tree 0
            of an unsampled forest with mtry = p is train_cart(ds, params, seed)
        bootstrap: Draw n rows with replacement per tree (False trains on all rows)
        jobs: Worker threads; results do not depend on it

    Raises:
        LearnError: If n_trees or mtry is out of range
    """
    params = params or CartParams()
    n, p = ds.X.shape
    mtry = mtry or default_mtry(p)
    if n_trees < 1:
        raise LearnError(f"n_trees must be >= 1, got {n_trees}")
    if not 1 <= mtry <= p:
        raise LearnError(f"mtry must be in [1, {p}], got {mtry}")

    def grow(i: int) -> tuple[DecisionTree, tuple[int, ...]]:
        if bootstrap:
            rng = np.random.default_rng(seed + i)
            sample = rng.integers(0, n, size=n)
            oob = tuple(int(j) for j in np.setdiff1d(np.arange(n), sample))
        else:
            sample = np.arange(n)
            oob = ()
        tree = fit_tree(
            ds.X[sample],
            ds.y[sample],
            ds.feature_names,
            params,
            max_features=None if mtry == p else mtry,
            random_state=seed + i,
        )
        return tree, oob

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            grown = list(pool.map(grow, range(n_trees)))
    else:
        grown = [grow(i) for i in range(n_trees)]

    logger.info(f"Trained forest: {n_trees} trees, mtry={mtry}, {n} rows")
    return Forest(
        trees=tuple(t for t, _ in grown),
        seed=seed,
        mtry=mtry,
        oob_indices=tuple(o for _, o in grown),
        feature_names=ds.feature_names,
    )


def predict_proba(model: DecisionTree | Forest, features: Mapping[str, float]) -> float:
    """Positive-class score: leaf positive fraction, averaged over trees for a forest."""
    if isinstance(model, Forest):
        return float(np.mean([t.leaf_for(features).positive_fraction for t in model.trees]))
    return model.leaf_for(features).positive_fraction


def predict(model: DecisionTree | Forest, features: Mapping[str, float]) -> int:
    """Hard label; a forest score of exactly 0.5 resolves to 0."""
    if isinstance(model, Forest):
        return 1 if predict_proba(model, features) > 0.5 else 0
    return model.leaf_for(features).label


def variable_importance(forest: Forest) -> list[tuple[str, float]]:
    """Summed Gini decrease per feature, scaled so the top feature scores 100."""
    totals = {name: 0.0 for name in forest.feature_names}
    for tree in forest.trees:
        for node in tree.internal_nodes():
            decrease = gini(node.counts) * node.n_samples - sum(
                gini(c.counts) * c.n_samples for c in (node.left, node.right)
            )
            totals[node.feature] += decrease

    top = max(totals.values(), default=0.0)
    scale = 100.0 / top if top > 0 else 0.0
    ranked = sorted(totals.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(name, value * scale) for name, value in ranked]
