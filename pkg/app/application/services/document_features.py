"""Corpus-wide tokenization and per-document feature vectors."""

from collections import Counter
from collections.abc import Sequence
from functools import partial

from app.application.services.corpus_index import Corpus, EmailDoc
from app.application.services.text_pipeline import PipelineConfig, TokenStream, run_pipeline
from app.resources.scan_executor import ScanExecutor


def _tokenize_shard(config: PipelineConfig, docs: Sequence[EmailDoc]) -> list[TokenStream]:
    return [run_pipeline(doc.text, config) for doc in docs]


def _concat(a: list, b: list) -> list:
    return a + b


def tokenize_corpus(
    corpus: Corpus, config: PipelineConfig, executor: ScanExecutor | None = None
) -> list[TokenStream]:
    """Token streams of subject and body, in corpus order."""
    executor = executor or ScanExecutor()
    return executor.run(corpus.docs, partial(_tokenize_shard, config), _concat, [])


def term_counts(tokens: TokenStream) -> dict[str, float]:
    """Raw count per distinct token."""
    return {term: float(n) for term, n in Counter(tokens.tokens).items()}
