"""Bagged forests: determinism, voting and importance."""

import numpy as np
import pytest

from app.application.services.dataset import LabeledDataset, LearnError
from app.application.services.decision_tree import (
    CartParams,
    DecisionTree,
    TreeNode,
    predict_tree,
    train_cart,
)
from app.application.services.random_forest import (
    Forest,
    default_mtry,
    predict,
    predict_proba,
    train_forest,
    variable_importance,
)


@pytest.fixture(scope="module")
def signal_ds() -> LabeledDataset:
    """Label driven by 'signal'; four noise columns."""
    rng = np.random.default_rng(8)
    X = rng.normal(size=(150, 5))
    y = (X[:, 0] > 0).astype(int)
    return LabeledDataset(("signal", "n1", "n2", "n3", "n4"), X, y)


SMALL_TREES = CartParams(min_split=4, min_leaf=2, complexity_penalty=0.0)


def stump(feature: str, left_counts: tuple[int, int]) -> DecisionTree:
    left = TreeNode(counts=left_counts, impurity=0.0)
    right = TreeNode(counts=(0, 4), impurity=0.0)
    root = TreeNode(
        counts=(4, 4), impurity=0.5, feature=feature, threshold=0.5, left=left, right=right
    )
    return DecisionTree(root=root, feature_names=(feature,))


class TestTrainForest:
    """Training."""

    def test_same_seed_same_forest(self, signal_ds):
        """Seeded bootstraps reproduce exactly."""
        a = train_forest(signal_ds, 10, params=SMALL_TREES, seed=3)
        b = train_forest(signal_ds, 10, params=SMALL_TREES, seed=3)
        assert a == b

    def test_threads_do_not_change_result(self, signal_ds):
        """Worker count is not part of the model."""
        serial = train_forest(signal_ds, 8, params=SMALL_TREES, seed=5, jobs=1)
        threaded = train_forest(signal_ds, 8, params=SMALL_TREES, seed=5, jobs=4)
        assert serial == threaded

    def test_default_mtry(self, signal_ds):
        """floor(sqrt(5)) = 2."""
        assert default_mtry(5) == 2
        assert train_forest(signal_ds, 2, params=SMALL_TREES).mtry == 2

    def test_out_of_bag_rows(self, signal_ds):
        """OOB rows are the ones missing from each bootstrap."""
        forest = train_forest(signal_ds, 15, params=SMALL_TREES, seed=1)
        assert all(0 < len(oob) < len(signal_ds) for oob in forest.oob_indices)
        assert forest.oob_accuracy(signal_ds) > 0.75

    def test_no_bootstrap_has_no_oob(self, signal_ds):
        """Every tree sees every row."""
        forest = train_forest(signal_ds, 3, params=SMALL_TREES, bootstrap=False)
        assert forest.oob_indices == ((), (), ())
        assert forest.oob_accuracy(signal_ds) is None

    @pytest.mark.parametrize("n_trees,mtry", [(0, None), (3, 6)])
    def test_bad_arguments(self, signal_ds, n_trees, mtry):
        """n_trees >= 1 and 1 <= mtry <= p."""
        with pytest.raises(LearnError):
            train_forest(signal_ds, n_trees, mtry=mtry)

    def test_learns_signal(self, signal_ds):
        """Positive and negative extremes are classified correctly."""
        forest = train_forest(signal_ds, 25, params=SMALL_TREES, seed=2)
        assert predict(forest, {"signal": 2.5}) == 1
        assert predict(forest, {"signal": -2.5}) == 0

    def test_dict_round_trip(self, signal_ds):
        """Serialized forests predict identically."""
        forest = train_forest(signal_ds, 4, params=SMALL_TREES, seed=9)
        assert Forest.from_dict(forest.to_dict()) == forest


class TestVoting:
    """Probability averaging."""

    def test_average_of_leaf_fractions(self):
        """Mean over trees of the reached leaf's positive share."""
        forest = Forest(
            trees=(stump("x", (4, 0)), stump("x", (2, 2))),
            seed=0,
            mtry=1,
            oob_indices=((), ()),
            feature_names=("x",),
        )
        assert predict_proba(forest, {"x": 0}) == pytest.approx(0.25)
        assert predict(forest, {"x": 0}) == 0
        assert predict_proba(forest, {"x": 1}) == 1.0

    def test_exact_half_is_negative(self):
        """0.5 resolves to 0."""
        forest = Forest(
            trees=(stump("x", (4, 0)), stump("x", (0, 4))),
            seed=0,
            mtry=1,
            oob_indices=((), ()),
            feature_names=("x",),
        )
        assert predict_proba(forest, {"x": 0}) == 0.5
        assert predict(forest, {"x": 0}) == 0


class TestVariableImportance:
    """Gini decrease per feature."""

    def test_signal_ranks_first(self, signal_ds):
        """The only informative column scores 100."""
        forest = train_forest(signal_ds, 30, params=SMALL_TREES, seed=4)
        ranking = variable_importance(forest)
        assert ranking[0][0] == "signal"
        assert ranking[0][1] == pytest.approx(100.0)
        assert len(ranking) == 5
        assert all(0 <= score <= 100 + 1e-9 for _, score in ranking)

    def test_matches_recount_from_dumped_trees(self):
        """Gini decreases recomputed from the JSON dump of every tree."""
        rng = np.random.default_rng(12)
        X = rng.normal(size=(80, 3))
        y = ((X[:, 0] + 0.5 * X[:, 1] + rng.normal(0, 0.3, 80)) > 0).astype(int)
        ds = LabeledDataset(("a", "b", "c"), X, y)
        forest = train_forest(ds, 12, params=SMALL_TREES, seed=6)

        def node_gini(counts):
            n = sum(counts)
            return 1 - sum((c / n) ** 2 for c in counts) if n else 0.0

        def weight(node):
            counts = node["leaf"]["counts"] if "leaf" in node else node["counts"]
            return node_gini(counts) * sum(counts)

        totals = {"a": 0.0, "b": 0.0, "c": 0.0}
        stack = list(forest.to_dict()["trees"])
        while stack:
            node = stack.pop()
            if "leaf" in node:
                continue
            totals[node["feature"]] += weight(node) - weight(node["left"]) - weight(node["right"])
            stack += [node["left"], node["right"]]
        top = max(totals.values())
        scaled = ((k, v * 100 / top) for k, v in totals.items())
        expected = sorted(scaled, key=lambda kv: (-kv[1], kv[0]))

        ranking = variable_importance(forest)
        assert [name for name, _ in ranking] == [name for name, _ in expected]
        for (_, got), (_, want) in zip(ranking, expected):
            assert got == pytest.approx(want)

    def test_single_feature_scores_100(self):
        """One column takes all the credit."""
        x = np.arange(30, dtype=float).reshape(-1, 1)
        ds = LabeledDataset(("x",), x, (x[:, 0] >= 15).astype(int))
        [(name, score)] = variable_importance(train_forest(ds, 5, params=SMALL_TREES))
        assert (name, score) == ("x", pytest.approx(100.0))


class TestAgainstSingleTree:
    """Forests relative to plain CART."""

    PURE = CartParams(min_split=2, min_leaf=1, complexity_penalty=0.0)

    @pytest.fixture(scope="class")
    def separable(self) -> LabeledDataset:
        """Eight values of x, five rows each, positive from 4 up."""
        x = np.repeat(np.arange(8, dtype=float), 5).reshape(-1, 1)
        return LabeledDataset(("x",), x, (x[:, 0] >= 4).astype(int))

    def test_one_unsampled_tree_over_all_features_is_cart(self):
        """No bootstrap, mtry = p, one tree: the same tree as train_cart."""
        rng = np.random.default_rng(13)
        x = rng.integers(0, 20, size=60).astype(float)
        X = np.column_stack([x, x, x, rng.normal(size=60)])
        ds = LabeledDataset(("a", "b", "c", "noise"), X, (x >= 10).astype(int))
        forest = train_forest(ds, 1, mtry=4, params=SMALL_TREES, bootstrap=False)
        assert forest.trees[0] == train_cart(ds, SMALL_TREES)
        assert forest.trees[0] == train_cart(ds, SMALL_TREES, seed=42)

    def test_separable_training_accuracy(self, separable):
        """25 bagged trees classify every training row."""
        forest = train_forest(separable, 25, params=self.PURE, seed=7)
        rows = [{"x": float(v)} for v in separable.X[:, 0]]
        assert [predict(forest, r) for r in rows] == separable.y.tolist()

    def test_forest_no_worse_than_cart(self, separable):
        """Training accuracy of the forest is at least that of one tree."""
        forest = train_forest(separable, 25, params=self.PURE, seed=7)
        tree = train_cart(separable, self.PURE)
        rows = [({"x": float(v)}, int(label)) for v, label in zip(separable.X[:, 0], separable.y)]
        forest_acc = np.mean([predict(forest, r) == label for r, label in rows])
        tree_acc = np.mean([predict_tree(tree, r) == label for r, label in rows])
        assert tree_acc == 1.0
        assert forest_acc >= tree_acc
