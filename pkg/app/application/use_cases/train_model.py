"""Use case for training responsive-document and person-of-interest classifiers."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from app.application.services.classification_metrics import metrics_report
from app.application.services.corpus_index import Corpus
from app.application.services.dataset import (
    LabeledDataset,
    LearnError,
    cross_validate,
    oversample,
    split_train_test,
    undersample,
)
from app.application.services.decision_tree import CartParams, DecisionTree, train_cart
from app.application.services.document_features import tokenize_corpus
from app.application.services.knn import KnnModel
from app.application.services.random_forest import (
    Forest,
    predict,
    predict_proba,
    train_forest,
    variable_importance,
)
from app.application.services.term_matrix import (
    DocTermMatrix,
    Weighting,
    build_dtm,
    prune_sparse,
    tfidf,
    vocabulary_of,
)
from app.application.services.text_pipeline import PipelineConfig
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.lexicon_repository import LexiconRepository
from app.repository.model_repository import ModelBundle, ModelKind, ModelRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)

RESPONSIVE_LABELS = ("non-responsive", "responsive")
REPORTED_IMPORTANCE = 25


@dataclass
class TrainingOptions:
    """Model family, rebalancing and evaluation settings."""

    model_kind: ModelKind = ModelKind.CART
    sampler: str = "none"  # none | under | over
    seed: int = 42
    test_fraction: float = 0.3
    cv_folds: int = 3
    cart: CartParams = field(default_factory=CartParams)
    n_trees: int = 100
    mtry: int | None = None
    k: int = 5
    jobs: int = 1


@dataclass
class TrainingOutcome:
    model: DecisionTree | Forest | KnnModel
    report: dict[str, Any]


class ModelTrainer:
    """Split, rebalance, cross-validate, fit and score one model family."""

    SAMPLERS = {"none": None, "under": undersample, "over": oversample}

    def __init__(self, options: TrainingOptions):
        """Initialize trainer.

        Args:
            options: Training options
        """
        if options.sampler not in self.SAMPLERS:
            raise LearnError(f"Unknown sampler {options.sampler!r}")
        self.options = options

    def fit(self, ds: LabeledDataset) -> DecisionTree | Forest | KnnModel:
        opts = self.options
        if opts.model_kind is ModelKind.CART:
            return train_cart(ds, opts.cart, seed=opts.seed)
        if opts.model_kind is ModelKind.FOREST:
            return train_forest(
                ds, opts.n_trees, opts.mtry, opts.cart, seed=opts.seed, jobs=max(1, opts.jobs)
            )
        if opts.model_kind is ModelKind.KNN:
            if opts.k > len(ds):
                raise LearnError(f"k={opts.k} exceeds {len(ds)} training rows")
            return KnnModel(train=ds, k=opts.k)
        raise LearnError(f"Cannot train a {opts.model_kind.value} model")

    @staticmethod
    def score(
        model: DecisionTree | Forest | KnnModel, ds: LabeledDataset
    ) -> tuple[list[int], list[float]]:
        """Hard labels and positive-class scores for every row."""
        labels, scores = [], []
        for i in range(len(ds)):
            features = ds.row_features(i)
            if isinstance(model, KnnModel):
                labels.append(model.predict(features))
                scores.append(model.predict_proba(features))
            else:
                labels.append(predict(model, features))
                scores.append(predict_proba(model, features))
        return labels, scores

    def rebalance(self, ds: LabeledDataset) -> LabeledDataset:
        sampler = self.SAMPLERS[self.options.sampler]
        return ds if sampler is None else sampler(ds, self.options.seed)

    def run(self, ds: LabeledDataset) -> TrainingOutcome:
        """Hold out a test split, rebalance the rest, cross-validate and evaluate.

        Raises:
            LearnError: If the data cannot be split, rebalanced or fitted
        """
        opts = self.options
        train, test = split_train_test(ds, opts.test_fraction, opts.seed)
        balanced = self.rebalance(train)

        cv = cross_validate(
            balanced,
            opts.cv_folds,
            lambda tr, te: self.score(self.fit(tr), te)[0],
            opts.seed,
        )
        model = self.fit(balanced)
        labels, scores = self.score(model, test)

        report: dict[str, Any] = {
            "model": opts.model_kind.value,
            "sampler": opts.sampler,
            "seed": opts.seed,
            "rows": {
                "total": len(ds),
                "positive": ds.n_positive,
                "train": len(train),
                "test": len(test),
                "train_balanced": len(balanced),
                "train_balanced_positive": balanced.n_positive,
            },
            "n_features": len(ds.feature_names),
            "cross_validation": cv.to_dict(),
            "test_metrics": metrics_report(labels, test.y.tolist(), scores),
        }
        if isinstance(model, Forest):
            report["oob_accuracy"] = model.oob_accuracy(balanced)
            report["importance"] = [
                [name, value] for name, value in variable_importance(model)[:REPORTED_IMPORTANCE]
            ]
        if isinstance(model, DecisionTree):
            report["leaves"] = len(model.leaves())

        logger.info(
            f"{opts.model_kind.value}: CV accuracy {cv.mean_accuracy:.4f}, "
            f"test accuracy {report['test_metrics']['accuracy']:.4f}"
        )
        return TrainingOutcome(model=model, report=report)


def responsive_dataset(
    corpus: Corpus,
    config: PipelineConfig,
    max_sparsity: float,
    weighting: Weighting,
    executor: ScanExecutor | None = None,
) -> tuple[LabeledDataset, DocTermMatrix]:
    """Document-term dataset of the expert-scored documents (label column set).

    Raises:
        LearnError: If no document carries a label
    """
    scored = Corpus(
        docs=tuple(d for d in corpus.docs if d.label is not None),
        alias_table=corpus.alias_table,
    )
    if not scored.docs:
        raise LearnError("Corpus has no labeled documents to train on")

    tokens = tokenize_corpus(scored, config, executor)
    dtm = prune_sparse(build_dtm(tokens, [d.id for d in scored.docs]), max_sparsity)
    if weighting is Weighting.TFIDF:
        dtm = tfidf(dtm)

    y = np.array([1 if d.label and d.label > 0 else 0 for d in scored.docs], dtype=int)
    ds = LabeledDataset(
        feature_names=dtm.vocab,
        X=dtm.matrix.toarray().astype(float),
        y=y,
        positive_label_name=RESPONSIVE_LABELS[1],
        row_ids=dtm.doc_ids,
    )
    return ds, dtm


@dataclass
class TrainResponse:
    report: dict[str, Any]
    bundle: ModelBundle
    model_path: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {"target": self.bundle.target, **self.report, "model_path": self.model_path}


class TrainModelUseCase:
    """Train a classifier on a labeled corpus (responsive) or a POI table (poi)."""

    def __init__(
        self,
        executor: ScanExecutor | None = None,
        model_repository: ModelRepository | None = None,
    ):
        """Initialize use case.

        Args:
            executor: Shard executor for tokenization
            model_repository: Model file writer
        """
        self._executor = executor
        self._models = model_repository or ModelRepository()

    def execute_responsive(
        self,
        corpus_path: Path,
        options: TrainingOptions,
        max_sparsity: float = 0.97,
        weighting: Weighting = Weighting.RAW_COUNT,
        stopwords_path: Path | None = None,
        aliases_path: Path | None = None,
        model_out: Path | None = None,
    ) -> TrainResponse:
        """Train on the labeled documents of a corpus.

        Args:
            corpus_path: Corpus CSV with a label/responsive column
            options: Training options
            max_sparsity: Vocabulary pruning threshold
            weighting: Cell weighting of the document-term matrix
            stopwords_path: Stopword list (default: built-in)
            aliases_path: Alias table
            model_out: Where to write the model file

        Returns:
            TrainResponse
        """
        corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
        config = PipelineConfig.ediscovery(LexiconRepository.open_stopwords(stopwords_path))
        ds, dtm = responsive_dataset(corpus, config, max_sparsity, weighting, self._executor)

        outcome = ModelTrainer(options).run(ds)
        bundle = ModelBundle(
            kind=options.model_kind,
            target="responsive",
            model=outcome.model,
            label_names=RESPONSIVE_LABELS,
            vocabulary=vocabulary_of(dtm),
            weighting=weighting,
            params=_params(options),
        )
        return self._finish(outcome, bundle, model_out)

    def execute_dataset(
        self,
        ds: LabeledDataset,
        options: TrainingOptions,
        target: str,
        label_names: tuple[str, str],
        model_out: Path | None = None,
    ) -> TrainResponse:
        """Train on an already assembled feature table."""
        outcome = ModelTrainer(options).run(ds)
        bundle = ModelBundle(
            kind=options.model_kind,
            target=target,
            model=outcome.model,
            label_names=label_names,
            params=_params(options),
        )
        return self._finish(outcome, bundle, model_out)

    def _finish(
        self, outcome: TrainingOutcome, bundle: ModelBundle, model_out: Path | None
    ) -> TrainResponse:
        if model_out is not None:
            self._models.save_path(bundle, model_out)
        return TrainResponse(
            report=outcome.report,
            bundle=bundle,
            model_path=str(model_out) if model_out else None,
        )


def _params(options: TrainingOptions) -> dict[str, Any]:
    params: dict[str, Any] = {"seed": options.seed, "sampler": options.sampler}
    if options.model_kind in (ModelKind.CART, ModelKind.FOREST):
        params.update(options.cart.model_dump())
    if options.model_kind is ModelKind.FOREST:
        params.update({"n_trees": options.n_trees, "mtry": options.mtry})
    if options.model_kind is ModelKind.KNN:
        params["k"] = options.k
    return params
