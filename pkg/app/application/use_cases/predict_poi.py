"""Use case for person-of-interest prediction from financials and email behaviour."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from app.application.services.builtin_rulesets import builtin_ruleset
from app.application.services.business_rules import RuleSet, ruleset_coverage
from app.application.services.classification_metrics import metrics_report
from app.application.services.corpus_index import PersonId
from app.application.services.dataset import LabeledDataset
from app.application.services.poi_features import (
    POI_LABEL_NAME,
    JoinMode,
    email_features,
    join_features,
)
from app.application.services.sentiment_analyzer import sender_profiles
from app.application.services.text_pipeline import PipelineConfig
from app.application.use_cases.train_model import TrainingOptions, TrainModelUseCase
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.financial_repository import FillStrategy, FinancialRepository
from app.repository.lexicon_repository import LexiconRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)

POI_LABELS = (f"not {POI_LABEL_NAME}", POI_LABEL_NAME)


@dataclass
class PoiInputs:
    """Paths feeding a POI table."""

    financials: Path
    corpus: Path | None = None
    aliases: Path | None = None
    valence_lexicon: Path | None = None
    emotion_lexicon: Path | None = None
    deception_lexicon: Path | None = None


def assemble_poi_dataset(
    inputs: PoiInputs,
    mode: JoinMode,
    fill: FillStrategy = FillStrategy.ZERO,
    executor: ScanExecutor | None = None,
) -> tuple[LabeledDataset, dict[str, Any]]:
    """Load financials, derive email features when a corpus is given, and join.

    The POI set is every financial row flagged poi plus every sender of a
    poi-flagged message. Email features are computed for the financial persons.

    Returns:
        Tuple of (dataset, load summary)
    """
    records, load_report = FinancialRepository().open_financials(inputs.financials, fill)
    summary: dict[str, Any] = {"financials": load_report.to_dict()}

    email = []
    poi_set: set[PersonId] = {r.person for r in records if r.poi}
    if inputs.corpus is not None and mode is not JoinMode.FINANCIAL_ONLY:
        corpus, parse_report = open_corpus(inputs.corpus, open_alias_table(inputs.aliases))
        poi_set |= {d.sender for d in corpus.docs if d.poi_flag}
        lexicons = LexiconRepository.open_lexicon_set(
            inputs.valence_lexicon, inputs.emotion_lexicon, inputs.deception_lexicon
        )
        profiles = sender_profiles(corpus, PipelineConfig.sentiment(), lexicons, executor)
        email = email_features(corpus, poi_set, profiles, persons=[r.person for r in records])
        summary["corpus"] = parse_report.to_dict()

    ds = join_features(records, email, mode, poi_set)
    return ds, summary


@dataclass
class PoiResponse:
    report: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return self.report


class PredictPoiUseCase:
    """Evaluate a shipped POI rule set, or train and evaluate a classifier."""

    def __init__(
        self,
        executor: ScanExecutor | None = None,
        trainer: TrainModelUseCase | None = None,
    ):
        """Initialize use case.

        Args:
            executor: Shard executor for sentiment profiling
            trainer: Training use case for model-based prediction
        """
        self._executor = executor
        self._trainer = trainer or TrainModelUseCase(executor)

    def execute(
        self,
        inputs: PoiInputs,
        mode: JoinMode,
        fill: FillStrategy = FillStrategy.ZERO,
        ruleset: str | None = None,
        options: TrainingOptions | None = None,
        model_out: Path | None = None,
    ) -> PoiResponse:
        """Run POI prediction.

        Args:
            inputs: Financial table and optional corpus/lexicons
            mode: Which feature blocks to join
            fill: Blank-fill strategy for financials
            ruleset: Builtin rule set name; when set no model is trained
            options: Training options for model-based prediction
            model_out: Where to write a trained model

        Returns:
            PoiResponse
        """
        ds, summary = assemble_poi_dataset(inputs, mode, fill, self._executor)
        report: dict[str, Any] = {
            "mode": mode.value,
            "fill": fill.value,
            "persons": len(ds),
            "poi": ds.n_positive,
            "load": summary,
        }

        if ruleset is not None:
            report.update(self._evaluate_ruleset(builtin_ruleset(ruleset), ds))
            report["ruleset"] = ruleset
        else:
            response = self._trainer.execute_dataset(
                ds, options or TrainingOptions(), "poi", POI_LABELS, model_out
            )
            report.update(response.to_dict())
        return PoiResponse(report=report)

    @staticmethod
    def _evaluate_ruleset(rs: RuleSet, ds: LabeledDataset) -> dict[str, Any]:
        predicted = [rs.apply(ds.row_features(i)) for i in range(len(ds))]
        actual = ds.y.tolist()
        return {
            "metrics": metrics_report(predicted, actual, [float(p) for p in predicted]),
            "coverage": [c.to_dict() for c in ruleset_coverage(rs, ds)],
            "rules": rs.render(),
        }
