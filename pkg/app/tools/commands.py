"""Command-line subcommands: argument parsing, dispatch and exit codes."""

import argparse
import json
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

from app.application.services.builtin_rulesets import BUILTIN_RULESETS
from app.application.services.classification_metrics import MetricsError
from app.application.services.corpus_index import CorpusError
from app.application.services.dataset import LearnError
from app.application.services.decision_tree import CartParams, TreeInvariantError
from app.application.services.pii_scanner import PiiError
from app.application.services.poi_features import JoinMode, PoiError
from app.application.services.sentiment_analyzer import Bucket, SentimentError
from app.application.services.term_matrix import DtmError, Weighting
from app.application.use_cases.analyze_sentiment import AnalyzeSentimentUseCase
from app.application.use_cases.check_benford import CheckBenfordUseCase, Series
from app.application.use_cases.classify_documents import ClassifyDocumentsUseCase
from app.application.use_cases.ingest_corpus import IngestCorpusUseCase
from app.application.use_cases.predict_poi import (
    POI_LABELS,
    PoiInputs,
    PredictPoiUseCase,
    assemble_poi_dataset,
)
from app.application.use_cases.render_rules import RenderRulesUseCase
from app.application.use_cases.scan_pii import ScanPiiUseCase
from app.application.use_cases.train_model import TrainingOptions, TrainModelUseCase
from app.repository.financial_repository import FillStrategy, FinancialsError
from app.repository.lexicon_repository import LexiconError
from app.repository.model_repository import ModelFormatError, ModelKind
from app.resources.run_config import RunConfig
from app.resources.scan_executor import ScanExecutor, ScanExecutorError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3

# Raised on bad or missing input; everything else is an internal error
INPUT_ERRORS: tuple[type[Exception], ...] = (
    OSError,
    ValueError,
    CorpusError,
    DtmError,
    LearnError,
    MetricsError,
    PiiError,
    SentimentError,
    LexiconError,
    FinancialsError,
    PoiError,
    ModelFormatError,
    ScanExecutorError,
)


def training_options(config: RunConfig, executor: ScanExecutor) -> TrainingOptions:
    return TrainingOptions(
        model_kind=ModelKind(config.model_kind),
        sampler=config.sampler,
        seed=config.seed,
        test_fraction=config.test_fraction,
        cv_folds=config.cv_folds,
        cart=CartParams(
            min_split=config.min_split,
            min_leaf=config.min_leaf,
            max_depth=config.max_depth,
            complexity_penalty=config.complexity_penalty,
        ),
        n_trees=config.n_trees,
        mtry=config.mtry,
        k=config.k,
        jobs=executor.jobs,
    )


def poi_inputs(config: RunConfig) -> PoiInputs:
    return PoiInputs(
        financials=config.financials,
        corpus=config.corpus,
        aliases=config.aliases,
        valence_lexicon=config.valence_lexicon,
        emotion_lexicon=config.emotion_lexicon,
        deception_lexicon=config.deception_lexicon,
    )


def cmd_ingest(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    config.require("corpus")
    return IngestCorpusUseCase().execute(config.corpus, config.aliases, config.export).to_dict()


def cmd_pii(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    config.require("corpus")
    response = ScanPiiUseCase(executor).execute(
        config.corpus,
        dl_formats_path=config.dl_formats,
        aliases_path=config.aliases,
        include_contact=config.include_contact,
        keyword_window=config.keyword_window,
        context_width=config.context_width,
        findings_out=config.findings_out,
        echo=not config.no_echo,
    )
    return response.to_dict()


def cmd_train(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    options = training_options(config, executor)
    use_case = TrainModelUseCase(executor)
    if config.target == "poi":
        config.require("financials")
        ds, _ = assemble_poi_dataset(
            poi_inputs(config), JoinMode(config.join_mode), FillStrategy(config.fill), executor
        )
        response = use_case.execute_dataset(ds, options, "poi", POI_LABELS, config.model_out)
    else:
        config.require("corpus")
        response = use_case.execute_responsive(
            config.corpus,
            options,
            max_sparsity=config.max_sparsity,
            weighting=Weighting(config.weighting),
            stopwords_path=config.stopwords,
            aliases_path=config.aliases,
            model_out=config.model_out,
        )
    return response.to_dict()


def cmd_classify(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    config.require("corpus")
    response = ClassifyDocumentsUseCase(executor).execute(
        config.corpus,
        model_path=config.model,
        ruleset_name=config.ruleset,
        rules_path=config.rules_file,
        positive_only=config.positive_only,
        stopwords_path=config.stopwords,
        aliases_path=config.aliases,
        labels_out=config.labels_out,
    )
    return response.to_dict()


def cmd_rules(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    response = RenderRulesUseCase(executor).execute(
        model_path=config.model,
        ruleset_name=config.ruleset,
        rules_path=config.rules_file,
        positive_only=config.positive_only,
        corpus_path=config.corpus,
        stopwords_path=config.stopwords,
        aliases_path=config.aliases,
        text_out=config.text_out,
    )
    return response.to_dict()


def cmd_sentiment(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    config.require("corpus")
    response = AnalyzeSentimentUseCase(executor).execute(
        config.corpus,
        bucket=Bucket(config.bucket),
        valence_path=config.valence_lexicon,
        emotion_path=config.emotion_lexicon,
        deception_path=config.deception_lexicon,
        aliases_path=config.aliases,
    )
    return response.to_dict()


def cmd_poi(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    config.require("financials")
    response = PredictPoiUseCase(executor).execute(
        poi_inputs(config),
        JoinMode(config.join_mode),
        FillStrategy(config.fill),
        ruleset=config.ruleset,
        options=training_options(config, executor),
        model_out=config.model_out,
    )
    return response.to_dict()


def cmd_benford(config: RunConfig, executor: ScanExecutor) -> dict[str, Any]:
    response = CheckBenfordUseCase().execute(
        Series(config.series),
        corpus_path=config.corpus,
        values_path=config.values_file,
        aliases_path=config.aliases,
    )
    return response.to_dict()


COMMANDS: dict[str, Callable[[RunConfig, ScanExecutor], dict[str, Any]]] = {
    "ingest": cmd_ingest,
    "pii": cmd_pii,
    "train": cmd_train,
    "classify": cmd_classify,
    "rules": cmd_rules,
    "sentiment": cmd_sentiment,
    "poi": cmd_poi,
    "benford": cmd_benford,
}


def _global_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, help="Random seed (default 42)")
    parent.add_argument("--jobs", type=int, help="Worker processes; 0 = all cores")
    parent.add_argument("--out", type=Path, help="Write the JSON report here instead of stdout")
    parent.add_argument("--format", choices=["json"], default="json")
    return parent


def _add_corpus(parser: argparse.ArgumentParser, required: bool = False) -> None:
    parser.add_argument("--corpus", type=Path, required=required, help="Corpus CSV")
    parser.add_argument("--aliases", type=Path, help="Alias table CSV")


def _add_lexicons(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--valence-lexicon", type=Path)
    parser.add_argument("--emotion-lexicon", type=Path)
    parser.add_argument("--deception-lexicon", type=Path)


def _add_classifier_source(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group()
    source.add_argument("--model", type=Path, help="Model file written by train")
    source.add_argument("--ruleset", choices=sorted(BUILTIN_RULESETS), help="Builtin rule set")
    source.add_argument("--rules-file", type=Path, help="Rule text file")
    parser.add_argument("--positive-only", action="store_true", help="Apply only label-1 rules")


def _add_training(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model-kind", choices=["cart", "forest", "knn"])
    parser.add_argument("--sampler", choices=["none", "under", "over"])
    parser.add_argument("--k", type=int, help="Neighbours for knn")
    parser.add_argument("--n-trees", type=int)
    parser.add_argument("--mtry", type=int, help="Features tried per forest split")
    parser.add_argument("--test-fraction", type=float)
    parser.add_argument("--cv-folds", type=int)
    parser.add_argument("--min-split", type=int)
    parser.add_argument("--min-leaf", type=int)
    parser.add_argument("--max-depth", type=int)
    parser.add_argument("--complexity-penalty", type=float)
    parser.add_argument("--model-out", type=Path, help="Write the trained model here")


def _add_poi_join(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--financials", type=Path, help="Financial table CSV")
    parser.add_argument("--join-mode", choices=[m.value for m in JoinMode])
    parser.add_argument("--fill", choices=[f.value for f in FillStrategy])
    _add_lexicons(parser)


def build_parser() -> argparse.ArgumentParser:
    """Parser for every subcommand; global flags are accepted after the subcommand."""
    parser = argparse.ArgumentParser(
        prog="mailforensics", description="Forensic text mining of email corpora"
    )
    parent = _global_options()
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[parent], help="Parse a corpus and report statistics")
    _add_corpus(p, required=True)
    p.add_argument("--export", type=Path, help="JSON-lines export of the parsed documents")

    p = sub.add_parser("pii", parents=[parent], help="Count personal information per category")
    _add_corpus(p, required=True)
    p.add_argument("--dl-formats", type=Path, help="Driver's-license format table")
    p.add_argument("--include-contact", action="store_true", help="Also detect emails and IPs")
    p.add_argument("--keyword-window", type=int)
    p.add_argument("--context-width", type=int)
    p.add_argument("--findings-out", type=Path, help="JSON-lines file for every finding")
    p.add_argument("--no-echo", action="store_true", help="Export masked shapes only")

    p = sub.add_parser("train", parents=[parent], help="Train a classifier")
    p.add_argument("--target", choices=["responsive", "poi"])
    _add_corpus(p)
    p.add_argument("--stopwords", type=Path)
    p.add_argument("--weighting", choices=[w.value for w in Weighting])
    p.add_argument("--max-sparsity", type=float)
    _add_training(p)
    _add_poi_join(p)

    p = sub.add_parser("classify", parents=[parent], help="Label every document of a corpus")
    _add_corpus(p, required=True)
    p.add_argument("--stopwords", type=Path)
    _add_classifier_source(p)
    p.add_argument("--labels-out", type=Path, help="JSON-lines file for per-document labels")

    p = sub.add_parser("rules", parents=[parent], help="Render a model as business rules")
    _add_classifier_source(p)
    _add_corpus(p)
    p.add_argument("--stopwords", type=Path)
    p.add_argument("--text-out", type=Path, help="Plain-text file for the rendered rules")

    p = sub.add_parser("sentiment", parents=[parent], help="Emotion radar, timeline and clusters")
    _add_corpus(p, required=True)
    _add_lexicons(p)
    p.add_argument("--bucket", choices=[b.value for b in Bucket])

    p = sub.add_parser("poi", parents=[parent], help="Predict persons of interest")
    _add_corpus(p)
    _add_poi_join(p)
    p.add_argument("--ruleset", choices=sorted(BUILTIN_RULESETS), help="Evaluate a builtin set")
    _add_training(p)

    p = sub.add_parser("benford", parents=[parent], help="Benford first-digit conformity")
    p.add_argument("--series", choices=[s.value for s in Series])
    _add_corpus(p)
    p.add_argument("--values-file", type=Path, help="One number per line")

    return parser


def write_report(payload: dict[str, Any], out: Path | None) -> None:
    """Key-sorted JSON to stdout or a file."""
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    logger.info(f"Wrote report to {out}")


def dispatch(args: argparse.Namespace) -> int:
    """Run one parsed subcommand and map its outcome to an exit code."""
    try:
        config = RunConfig.from_args(vars(args))
        executor = ScanExecutor(jobs=config.jobs)
        payload = COMMANDS[config.command](config, executor)
        write_report(payload, config.out)
        return EXIT_OK

    except TreeInvariantError as e:
        logger.exception(f"Invariant violated: {e}")
        return EXIT_INTERNAL_ERROR

    except INPUT_ERRORS as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_INPUT_ERROR

    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return EXIT_INTERNAL_ERROR
