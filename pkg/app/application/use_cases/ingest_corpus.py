"""Use case for ingesting an email corpus and summarizing it."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from app.application.services.corpus_index import corpus_stats
from app.repository.corpus_repository import export_corpus, open_alias_table, open_corpus

logger = logging.getLogger(__name__)


@dataclass
class IngestResponse:
    """Parse report plus corpus statistics."""

    parse_report: dict[str, Any]
    stats: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"parse_report": self.parse_report, "stats": self.stats}


class IngestCorpusUseCase:
    """Parse a corpus CSV and report counts, drops and per-day volumes."""

    def execute(
        self,
        corpus_path: Path,
        aliases_path: Path | None = None,
        export_path: Path | None = None,
    ) -> IngestResponse:
        """Ingest a corpus.

        Args:
            corpus_path: Corpus CSV
            aliases_path: Alias table CSV (default: built-in roster)
            export_path: Optional JSON-lines export of the parsed documents

        Returns:
            IngestResponse
        """
        corpus, report = open_corpus(corpus_path, open_alias_table(aliases_path))
        if export_path is not None:
            export_path.parent.mkdir(parents=True, exist_ok=True)
            with open(export_path, "w", encoding="utf-8") as f:
                export_corpus(corpus, f)
            logger.info(f"Exported {len(corpus)} documents to {export_path}")

        stats = corpus_stats(corpus)
        logger.info(
            f"Corpus: {stats.doc_count} documents, {len(stats.per_sender_counts)} senders, "
            f"{stats.total_words} words"
        )
        return IngestResponse(parse_report=report.to_dict(), stats=stats.to_dict())
