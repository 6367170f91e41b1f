"""CART decision trees: training, prediction and JSON tree dumps."""

import logging
from collections.abc import Iterator, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from sklearn.tree import DecisionTreeClassifier

from app.application.services.dataset import LabeledDataset, LearnError

logger = logging.getLogger(__name__)


class TreeInvariantError(Exception):
    """Raised when a trained tree violates a structural invariant."""

    pass


class CartParams(BaseModel):
    """Stopping rules for recursive partitioning."""

    model_config = ConfigDict(frozen=True)

    min_split: int = Field(default=20, ge=2)
    min_leaf: int = Field(default=7, ge=1)
    max_depth: int = Field(default=30, ge=1)
    complexity_penalty: float = Field(default=0.01, ge=0.0, lt=1.0)

    @model_validator(mode="after")
    def _leaf_fits_split(self) -> "CartParams":
        if self.min_leaf > self.min_split:
            raise ValueError(f"min_leaf ({self.min_leaf}) exceeds min_split ({self.min_split})")
        return self


@dataclass(frozen=True)
class TreeNode:
    """Binary tree node; leaves have no feature.

    Internal nodes route value < threshold left and value >= threshold right. Thresholds
    sit strictly between the float64 training values on either side.
    """

    counts: tuple[int, int]  # (negative, positive) training rows reaching the node
    impurity: float
    feature: str | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    @property
    def n_samples(self) -> int:
        return self.counts[0] + self.counts[1]

    @property
    def label(self) -> int:
        """Majority class, ties resolve to 0."""
        return 1 if self.counts[1] > self.counts[0] else 0

    @property
    def positive_fraction(self) -> float:
        return self.counts[1] / self.n_samples if self.n_samples else 0.0

    def to_dict(self) -> dict[str, Any]:
        if self.is_leaf:
            return {
                "leaf": {"label": self.label, "counts": list(self.counts)},
                "impurity": self.impurity,
            }
        return {
            "feature": self.feature,
            "threshold": self.threshold,
            "counts": list(self.counts),
            "impurity": self.impurity,
            "left": self.left.to_dict(),
            "right": self.right.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "TreeNode":
        if "leaf" in data:
            counts = data["leaf"]["counts"]
            return cls(counts=(int(counts[0]), int(counts[1])), impurity=float(data["impurity"]))
        counts = data["counts"]
        return cls(
            counts=(int(counts[0]), int(counts[1])),
            impurity=float(data["impurity"]),
            feature=str(data["feature"]),
            threshold=float(data["threshold"]),
            left=cls.from_dict(data["left"]),
            right=cls.from_dict(data["right"]),
        )


@dataclass(frozen=True)
class DecisionTree:
    """Trained classifier over named features."""

    root: TreeNode
    feature_names: tuple[str, ...]

    def leaf_for(self, features: Mapping[str, float]) -> TreeNode:
        """Walk to the leaf reached by a named vector (missing features are 0)."""
        node = self.root
        while not node.is_leaf:
            value = float(features.get(node.feature, 0.0))
            node = node.left if value < node.threshold else node.right
        return node

    def internal_nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            node = stack.pop()
            if not node.is_leaf:
                yield node
                stack.extend((node.right, node.left))

    def leaves(self) -> list[TreeNode]:
        """Leaves in left-to-right order."""
        out: list[TreeNode] = []
        stack = [self.root]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.extend((node.right, node.left))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {"feature_names": list(self.feature_names), "root": self.root.to_dict()}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DecisionTree":
        return cls(
            root=TreeNode.from_dict(data["root"]),
            feature_names=tuple(data["feature_names"]),
        )


def predict_tree(tree: DecisionTree, features: Mapping[str, float]) -> int:
    """Label of the leaf a named vector reaches."""
    return tree.leaf_for(features).label


def gini(counts: tuple[int, int]) -> float:
    """1 - sum(p_k^2)."""
    n = counts[0] + counts[1]
    if n == 0:
        return 0.0
    p = counts[1] / n
    return 1.0 - p * p - (1.0 - p) * (1.0 - p)


def check_impurity(tree: DecisionTree, tolerance: float = 1e-9) -> None:
    """Assert no split raises the weighted Gini impurity of its own rows.

    Raises:
        TreeInvariantError: On the first offending split
    """
    for node in tree.internal_nodes():
        parent = gini(node.counts) * node.n_samples
        children = sum(gini(c.counts) * c.n_samples for c in (node.left, node.right))
        if children > parent + tolerance:
            raise TreeInvariantError(
                f"Split on {node.feature} < {node.threshold} raises impurity "
                f"{parent / node.n_samples:.6f} -> {children / node.n_samples:.6f}"
            )


def _convert(
    clf: DecisionTreeClassifier, X: np.ndarray, feature_names: tuple[str, ...]
) -> TreeNode:
    """Translate a fitted sklearn tree into TreeNode form.

    sklearn splits float32 copies of X with value <= threshold. Each threshold is
    rebuilt as the midpoint between the largest training value sent left and the
    smallest sent right, so routing the original rows with value < threshold
    reproduces the fitted partition exactly.
    """
    t = clf.tree_
    classes = [int(c) for c in clf.classes_]
    paths = clf.decision_path(X).tocsc()

    def counts_at(node: int) -> tuple[int, int]:
        n = int(t.n_node_samples[node])
        value = t.value[node][0]
        fractions = value / value.sum()
        positive = 0
        for k, cls in enumerate(classes):
            if cls == 1:
                positive = int(round(fractions[k] * n))
        return (n - positive, positive)

    def threshold_at(j: int, left: int, right: int) -> float:
        lo = float(X[paths[:, left].indices, j].max())
        hi = float(X[paths[:, right].indices, j].min())
        mid = (lo + hi) / 2
        # Adjacent doubles: the midpoint rounds onto lo
        return hi if mid <= lo else mid

    def build(node: int) -> TreeNode:
        counts = counts_at(node)
        left, right = int(t.children_left[node]), int(t.children_right[node])
        if left == right:  # sklearn marks leaves with both children = -1
            return TreeNode(counts=counts, impurity=gini(counts))
        j = int(t.feature[node])
        return TreeNode(
            counts=counts,
            impurity=gini(counts),
            feature=feature_names[j],
            threshold=threshold_at(j, left, right),
            left=build(left),
            right=build(right),
        )

    return build(0)


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: tuple[str, ...],
    params: CartParams,
    max_features: int | None = None,
    random_state: int = 0,
) -> DecisionTree:
    """Greedy Gini CART on raw arrays.

    The complexity penalty is relative to the root impurity: a split must
    remove at least complexity_penalty x root Gini, weighted by node share.
    """
    root_gini = gini((int((y == 0).sum()), int((y == 1).sum())))
    clf = DecisionTreeClassifier(
        criterion="gini",
        splitter="best",
        max_depth=params.max_depth,
        min_samples_split=params.min_split,
        min_samples_leaf=params.min_leaf,
        min_impurity_decrease=params.complexity_penalty * root_gini,
        max_features=max_features,
        random_state=random_state,
    )
    clf.fit(X, y)
    tree = DecisionTree(root=_convert(clf, X, feature_names), feature_names=feature_names)
    check_impurity(tree)
    return tree


def train_cart(
    ds: LabeledDataset, params: CartParams | None = None, seed: int = 42
) -> DecisionTree:
    """Train a single CART tree.

    Args:
        ds: Training rows
        params: Stopping rules (defaults: min_split 20, min_leaf 7, max_depth 30, cp 0.01)
        seed: Tie-break seed for equally good splits; a one-tree forest without
            bootstrap over every feature rebuilds this tree from the same seed

    Raises:
        LearnError: If the dataset has fewer than min_split rows
    """
    params = params or CartParams()
    if len(ds) < params.min_split:
        raise LearnError(f"Need at least {params.min_split} rows to train, got {len(ds)}")

    tree = fit_tree(ds.X, ds.y, ds.feature_names, params, random_state=seed)
    logger.info(
        f"Trained CART on {len(ds)} rows: {len(tree.leaves())} leaves, "
        f"{sum(1 for _ in tree.internal_nodes())} splits"
    )
    return tree
