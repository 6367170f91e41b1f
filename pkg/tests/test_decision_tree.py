"""CART training, prediction, impurity invariant and serialization."""

import numpy as np
import pytest

from app.application.services.dataset import LabeledDataset, LearnError
from app.application.services.decision_tree import (
    CartParams,
    DecisionTree,
    TreeInvariantError,
    TreeNode,
    check_impurity,
    gini,
    predict_tree,
    train_cart,
)

UNLIMITED_DEPTH_2 = CartParams(min_split=2, min_leaf=1, max_depth=2, complexity_penalty=0.0)


def twelve_rows() -> LabeledDataset:
    """'a' separates most rows, 'b' cleans up each side."""
    rows = []
    for a, label in ((0, 0), (1, 1)):
        for b in (1, 2, 3, 4, 5):
            rows.append(([a, b], label))
        rows.append(([a, 10], 1 - label))
    return LabeledDataset.from_rows(("a", "b"), rows)


def weighted_gini(y: np.ndarray) -> float:
    n = len(y)
    if n == 0:
        return 0.0
    p = y.mean()
    return n * (1 - p * p - (1 - p) * (1 - p))


def best_split(X: np.ndarray, y: np.ndarray, names: tuple[str, ...]):
    """Exhaustive search over every feature and midpoint; None if nothing improves."""
    parent = weighted_gini(y)
    scored = []
    for j, name in enumerate(names):
        values = np.unique(X[:, j])
        for lo, hi in zip(values[:-1], values[1:]):
            t = (lo + hi) / 2
            left = X[:, j] < t
            cost = weighted_gini(y[left]) + weighted_gini(y[~left])
            scored.append((cost, name, t, j))
    scored.sort(key=lambda s: s[0])
    if not scored or scored[0][0] >= parent - 1e-12:
        return None
    if len(scored) > 1:
        assert scored[1][0] > scored[0][0] + 1e-9, "fixture must have a unique best split"
    return scored[0]


def oracle_tree(X, y, names, depth):
    """Greedy recursive partition by exhaustive split search."""
    split = best_split(X, y, names) if depth > 0 else None
    if split is None:
        return ("leaf", int(y.sum()), len(y) - int(y.sum()))
    _, name, t, j = split
    left = X[:, j] < t
    return (
        name,
        t,
        oracle_tree(X[left], y[left], names, depth - 1),
        oracle_tree(X[~left], y[~left], names, depth - 1),
    )


def as_tuple(node: TreeNode):
    if node.is_leaf:
        return ("leaf", node.counts[1], node.counts[0])
    return (node.feature, node.threshold, as_tuple(node.left), as_tuple(node.right))


class TestTrainCart:
    """Greedy Gini partitioning."""

    def test_matches_exhaustive_split_search(self):
        """Depth-2 tree equals the brute-force greedy oracle."""
        ds = twelve_rows()
        tree = train_cart(ds, UNLIMITED_DEPTH_2)
        expected = oracle_tree(ds.X, ds.y, ds.feature_names, depth=2)
        assert as_tuple(tree.root) == expected
        assert tree.root.feature == "a"
        assert tree.root.threshold == 0.5
        assert all(leaf.impurity == 0 for leaf in tree.leaves())

    def test_forced_split(self):
        """Two separable rows per side split on the only useful feature."""
        ds = LabeledDataset.from_rows(
            ("x", "noise"),
            [([0, 5], 0), ([1, 5], 0), ([8, 5], 1), ([9, 5], 1)],
        )
        tree = train_cart(ds, CartParams(min_split=2, min_leaf=1, complexity_penalty=0.0))
        assert tree.root.feature == "x"
        assert tree.root.threshold == 4.5
        assert predict_tree(tree, {"x": 4.4}) == 0
        assert predict_tree(tree, {"x": 4.5}) == 1

    def test_rows_equal_in_float32_stay_on_their_side(self):
        """8 + 2**-21 rounds to 8.0 in float32; the stored threshold still separates it."""
        near = 8.0 + 2.0**-21
        far = 8.0 + 2.0**-20
        ds = LabeledDataset.from_rows(("x",), [([8.0], 0), ([near], 0), ([far], 1), ([far], 1)])
        tree = train_cart(ds, CartParams(min_split=2, min_leaf=1, complexity_penalty=0.0))
        assert near < tree.root.threshold < far
        assert [predict_tree(tree, {"x": v}) for v in ds.X[:, 0]] == ds.y.tolist()

    def test_too_few_rows(self):
        """Fewer rows than min_split."""
        ds = LabeledDataset.from_rows(("x",), [([0], 0), ([1], 1)])
        with pytest.raises(LearnError):
            train_cart(ds, CartParams())

    def test_min_leaf_respected(self):
        """No leaf smaller than min_leaf."""
        rng = np.random.default_rng(0)
        X = rng.integers(0, 10, size=(200, 4)).astype(float)
        y = (X[:, 0] + rng.normal(0, 2, 200) > 5).astype(int)
        ds = LabeledDataset(("f0", "f1", "f2", "f3"), X, y)
        tree = train_cart(ds, CartParams(min_split=20, min_leaf=7))
        assert min(leaf.n_samples for leaf in tree.leaves()) >= 7

    def test_complexity_penalty_prunes(self):
        """A large penalty leaves a stump."""
        rng = np.random.default_rng(1)
        X = rng.normal(size=(100, 3))
        y = (rng.random(100) < 0.5).astype(int)
        ds = LabeledDataset(("p", "q", "r"), X, y)
        tree = train_cart(ds, CartParams(complexity_penalty=0.9))
        assert tree.root.is_leaf

    def test_every_split_lowers_impurity(self):
        """Trained trees pass the impurity check."""
        rng = np.random.default_rng(2)
        X = rng.integers(0, 4, size=(300, 5)).astype(float)
        y = ((X[:, 1] > 1) ^ (X[:, 3] > 2)).astype(int)
        ds = LabeledDataset(tuple(f"f{i}" for i in range(5)), X, y)
        tree = train_cart(ds, CartParams(min_split=2, min_leaf=1, complexity_penalty=0.0))
        check_impurity(tree)
        assert len(tree.leaves()) > 2


class TestImpurity:
    """Gini and the split invariant."""

    @pytest.mark.parametrize(
        "counts,expected", [((5, 5), 0.5), ((4, 0), 0.0), ((0, 0), 0.0), ((3, 1), 0.375)]
    )
    def test_gini(self, counts, expected):
        """1 - sum p^2."""
        assert gini(counts) == pytest.approx(expected)

    def test_check_impurity_rejects_bad_split(self):
        """A split that mixes classes more than its parent."""
        bad = TreeNode(
            counts=(4, 0),
            impurity=0.0,
            feature="x",
            threshold=1.0,
            left=TreeNode(counts=(2, 2), impurity=0.5),
            right=TreeNode(counts=(2, 2), impurity=0.5),
        )
        with pytest.raises(TreeInvariantError):
            check_impurity(DecisionTree(root=bad, feature_names=("x",)))


class TestTreeNode:
    """Leaf labels and serialization."""

    def test_tie_resolves_to_negative(self):
        """Equal counts give label 0."""
        assert TreeNode(counts=(3, 3), impurity=0.5).label == 0

    def test_missing_feature_routes_as_zero(self):
        """Absent features are 0."""
        tree = train_cart(twelve_rows(), UNLIMITED_DEPTH_2)
        assert tree.leaf_for({}) is tree.leaf_for({"a": 0.0, "b": 0.0})

    def test_dict_round_trip(self):
        """to_dict / from_dict preserve structure."""
        tree = train_cart(twelve_rows(), UNLIMITED_DEPTH_2)
        assert DecisionTree.from_dict(tree.to_dict()) == tree
