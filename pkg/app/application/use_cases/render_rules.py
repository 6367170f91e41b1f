"""Use case for rendering a classifier as readable business rules."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from app.application.services.builtin_rulesets import builtin_ruleset
from app.application.services.business_rules import (
    RuleSet,
    extract_rules,
    parse_ruleset,
    ruleset_coverage,
)
from app.application.services.corpus_index import Corpus
from app.application.services.dataset import LabeledDataset, LearnError
from app.application.services.decision_tree import DecisionTree
from app.application.services.document_features import term_counts, tokenize_corpus
from app.application.services.text_pipeline import PipelineConfig
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.lexicon_repository import LexiconRepository
from app.repository.model_repository import ModelRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)


@dataclass
class RulesResponse:
    source: str
    ruleset: RuleSet
    coverage: list[dict[str, Any]] | None = None
    text_path: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "source": self.source,
            "ruleset": self.ruleset.to_dict(),
            "text": self.ruleset.render(),
            "coverage": self.coverage,
            "text_path": self.text_path,
        }


def _rule_dataset(
    rs: RuleSet, corpus: Corpus, config: PipelineConfig, executor: ScanExecutor | None
) -> LabeledDataset:
    """Term counts of the rule features over the labeled documents."""
    scored = Corpus(
        docs=tuple(d for d in corpus.docs if d.label is not None),
        alias_table=corpus.alias_table,
    )
    if not scored.docs:
        raise LearnError("Corpus has no labeled documents to measure rule coverage")

    features = rs.features
    rows = []
    for doc, tokens in zip(scored.docs, tokenize_corpus(scored, config, executor)):
        counts = term_counts(tokens)
        rows.append(([counts.get(f, 0.0) for f in features], 1 if doc.label > 0 else 0))
    return LabeledDataset.from_rows(
        features, rows, rs.label_names[1], [d.id for d in scored.docs]
    )


class RenderRulesUseCase:
    """Turn a CART model, a rule file or a builtin rule set into rule text."""

    def __init__(
        self,
        executor: ScanExecutor | None = None,
        model_repository: ModelRepository | None = None,
    ):
        """Initialize use case.

        Args:
            executor: Shard executor for coverage tokenization
            model_repository: Model file reader
        """
        self._executor = executor
        self._models = model_repository or ModelRepository()

    def load_ruleset(
        self,
        model_path: Path | None = None,
        ruleset_name: str | None = None,
        rules_path: Path | None = None,
    ) -> tuple[RuleSet, str]:
        """Resolve exactly one rule source.

        Raises:
            LearnError: If zero or several sources are given, or the model has no rule form
        """
        given = [s for s in (model_path, ruleset_name, rules_path) if s is not None]
        if len(given) != 1:
            raise LearnError("Give exactly one of --model, --ruleset or --rules-file")

        if ruleset_name is not None:
            return builtin_ruleset(ruleset_name), f"builtin:{ruleset_name}"
        if rules_path is not None:
            with open(rules_path, encoding="utf-8") as f:
                return parse_ruleset(f.read()), str(rules_path)

        bundle = self._models.load_path(model_path)
        if isinstance(bundle.model, RuleSet):
            return bundle.model, str(model_path)
        if isinstance(bundle.model, DecisionTree):
            return extract_rules(bundle.model, bundle.label_names), str(model_path)
        raise LearnError(f"A {bundle.kind.value} model has no rule form; train a cart model")

    def execute(
        self,
        model_path: Path | None = None,
        ruleset_name: str | None = None,
        rules_path: Path | None = None,
        positive_only: bool = False,
        corpus_path: Path | None = None,
        stopwords_path: Path | None = None,
        aliases_path: Path | None = None,
        text_out: Path | None = None,
    ) -> RulesResponse:
        """Render rules, optionally measuring per-rule coverage on a labeled corpus.

        Args:
            model_path: Model file from the train command
            ruleset_name: Builtin rule set name
            rules_path: Rule text file
            positive_only: Keep only the label-1 rules
            corpus_path: Labeled corpus for coverage
            stopwords_path: Stopword list (default: built-in)
            aliases_path: Alias table
            text_out: Plain-text file for the rendered rules

        Returns:
            RulesResponse
        """
        rs, source = self.load_ruleset(model_path, ruleset_name, rules_path)
        if positive_only:
            rs = rs.positive_only()

        coverage = None
        if corpus_path is not None:
            corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
            config = PipelineConfig.ediscovery(LexiconRepository.open_stopwords(stopwords_path))
            ds = _rule_dataset(rs, corpus, config, self._executor)
            coverage = [c.to_dict() for c in ruleset_coverage(rs, ds)]

        if text_out is not None:
            text_out.parent.mkdir(parents=True, exist_ok=True)
            text_out.write_text(rs.render(), encoding="utf-8")

        logger.info(f"Rendered {len(rs.rules)} rules from {source}")
        return RulesResponse(
            source=source,
            ruleset=rs,
            coverage=coverage,
            text_path=str(text_out) if text_out else None,
        )
