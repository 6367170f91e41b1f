"""Use case for labeling corpus documents with a trained model or a rule set."""

import json
import logging
from collections.abc import Sequence
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import Any

from app.application.services.builtin_rulesets import builtin_ruleset
from app.application.services.business_rules import RuleSet, parse_ruleset
from app.application.services.classification_metrics import metrics_report
from app.application.services.corpus_index import EmailDoc
from app.application.services.dataset import LearnError
from app.application.services.document_features import term_counts
from app.application.services.knn import KnnModel
from app.application.services.random_forest import predict, predict_proba
from app.application.services.term_matrix import project
from app.application.services.text_pipeline import PipelineConfig, run_pipeline
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.lexicon_repository import LexiconRepository
from app.repository.model_repository import ModelBundle, ModelKind, ModelRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DocumentLabel:
    doc_id: str
    label: int
    label_name: str
    score: float
    rule: int | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "doc_id": self.doc_id,
            "label": self.label,
            "label_name": self.label_name,
            "score": self.score,
            "rule": self.rule,
        }


def _label_document(bundle: ModelBundle, config: PipelineConfig, doc: EmailDoc) -> DocumentLabel:
    tokens = run_pipeline(doc.text, config)
    model = bundle.model
    if bundle.vocabulary is not None:
        features = project(bundle.vocabulary, tokens, bundle.weighting)
    else:
        features = term_counts(tokens)

    rule = None
    if isinstance(model, RuleSet):
        matched = model.first_match(features)
        label = model.apply(features)
        rule = model.rules.index(matched) + 1 if matched is not None else None
        score = float(label)
    elif isinstance(model, KnnModel):
        label, score = model.predict(features), model.predict_proba(features)
    else:
        label, score = predict(model, features), predict_proba(model, features)
    return DocumentLabel(doc.id, label, bundle.label_names[label], score, rule)


def _label_shard(
    bundle: ModelBundle, config: PipelineConfig, docs: Sequence[EmailDoc]
) -> list[DocumentLabel]:
    return [_label_document(bundle, config, doc) for doc in docs]


def _concat(a: list, b: list) -> list:
    return a + b


@dataclass
class ClassifyResponse:
    source: str
    documents: int
    counts: dict[str, int]
    positive: int
    labels_path: str | None
    metrics: dict[str, Any] | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "documents": self.documents,
            "counts": self.counts,
            "positive": self.positive,
            "positive_fraction": self.positive / self.documents if self.documents else 0.0,
            "labels_path": self.labels_path,
            "metrics": self.metrics,
        }


class ClassifyDocumentsUseCase:
    """Label every document of a corpus and summarize the result."""

    def __init__(
        self,
        executor: ScanExecutor | None = None,
        model_repository: ModelRepository | None = None,
    ):
        """Initialize use case.

        Args:
            executor: Shard executor
            model_repository: Model file reader
        """
        self._executor = executor or ScanExecutor()
        self._models = model_repository or ModelRepository()

    def load_classifier(
        self,
        model_path: Path | None = None,
        ruleset_name: str | None = None,
        rules_path: Path | None = None,
    ) -> tuple[ModelBundle, str]:
        """Resolve exactly one classifier source into a ModelBundle.

        Raises:
            LearnError: If zero or several sources are given, or a model targets persons
        """
        given = [s for s in (model_path, ruleset_name, rules_path) if s is not None]
        if len(given) != 1:
            raise LearnError("Give exactly one of --model, --ruleset or --rules-file")

        if model_path is not None:
            bundle = self._models.load_path(model_path)
            if bundle.target == "poi":
                raise LearnError("POI models label persons, not documents; use the poi command")
            return bundle, str(model_path)
        if ruleset_name is not None:
            rs, source = builtin_ruleset(ruleset_name), f"builtin:{ruleset_name}"
        else:
            with open(rules_path, encoding="utf-8") as f:
                rs, source = parse_ruleset(f.read()), str(rules_path)
        return ModelBundle(ModelKind.RULESET, "responsive", rs, rs.label_names), source

    def execute(
        self,
        corpus_path: Path,
        model_path: Path | None = None,
        ruleset_name: str | None = None,
        rules_path: Path | None = None,
        positive_only: bool = False,
        stopwords_path: Path | None = None,
        aliases_path: Path | None = None,
        labels_out: Path | None = None,
    ) -> ClassifyResponse:
        """Classify a corpus.

        Rule sets see raw stemmed-term counts; trained models see their own
        vocabulary and weighting.

        Args:
            corpus_path: Corpus CSV
            model_path: Model file from the train command
            ruleset_name: Builtin rule set name
            rules_path: Rule text file
            positive_only: Apply only the label-1 rules (rule sets only)
            stopwords_path: Stopword list (default: built-in)
            aliases_path: Alias table
            labels_out: JSON-lines file for per-document labels

        Returns:
            ClassifyResponse with per-label counts, plus metrics when documents are labeled
        """
        bundle, source = self.load_classifier(model_path, ruleset_name, rules_path)
        if positive_only:
            if not isinstance(bundle.model, RuleSet):
                raise LearnError("--positive-only applies to rule sets")
            bundle.model = bundle.model.positive_only()

        corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
        config = PipelineConfig.ediscovery(LexiconRepository.open_stopwords(stopwords_path))
        labels: list[DocumentLabel] = self._executor.run(
            corpus.docs, partial(_label_shard, bundle, config), _concat, []
        )

        if labels_out is not None:
            labels_out.parent.mkdir(parents=True, exist_ok=True)
            with open(labels_out, "w", encoding="utf-8") as f:
                for item in labels:
                    f.write(json.dumps(item.to_dict(), sort_keys=True) + "\n")

        counts = {name: 0 for name in bundle.label_names}
        for item in labels:
            counts[item.label_name] += 1
        positive = sum(item.label for item in labels)

        scored = [(lab, doc) for lab, doc in zip(labels, corpus.docs) if doc.label is not None]
        metrics = None
        if scored:
            metrics = metrics_report(
                [lab.label for lab, _ in scored],
                [1 if doc.label > 0 else 0 for _, doc in scored],
                [lab.score for lab, _ in scored],
            )

        logger.info(f"Classified {len(labels)} documents: {positive} positive")
        return ClassifyResponse(
            source=source,
            documents=len(labels),
            counts=counts,
            positive=positive,
            labels_path=str(labels_out) if labels_out else None,
            metrics=metrics,
        )
