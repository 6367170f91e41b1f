"""Use case for scanning a corpus for personal information."""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from app.application.services.pii_scanner import PiiConfig, scan_corpus
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.lexicon_repository import LexiconRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)


@dataclass
class PiiScanResponse:
    report: dict[str, Any]
    documents: int
    findings_path: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {**self.report, "documents": self.documents, "findings_path": self.findings_path}


class ScanPiiUseCase:
    """Count PII per category over a corpus, optionally exporting every finding."""

    def __init__(self, executor: ScanExecutor | None = None):
        """Initialize use case.

        Args:
            executor: Shard executor for the scan
        """
        self._executor = executor

    def execute(
        self,
        corpus_path: Path,
        dl_formats_path: Path | None = None,
        aliases_path: Path | None = None,
        include_contact: bool = False,
        keyword_window: int = 40,
        context_width: int = 80,
        findings_out: Path | None = None,
        echo: bool = True,
    ) -> PiiScanResponse:
        """Scan a corpus.

        Args:
            corpus_path: Corpus CSV
            dl_formats_path: Driver's-license format table (default: bundled table)
            aliases_path: Alias table
            include_contact: Also detect email and IP addresses
            keyword_window: Max distance between a passport/DL candidate and its keyword
            context_width: Context window length per finding
            findings_out: JSON-lines file for every finding
            echo: Write matched text; False writes only the masked shape

        Returns:
            PiiScanResponse
        """
        corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
        config = PiiConfig.build(
            LexiconRepository.open_dl_formats(dl_formats_path),
            include_contact=include_contact,
            keyword_window=keyword_window,
            context_width=context_width,
        )
        report = scan_corpus(
            corpus, config, self._executor, keep_findings=findings_out is not None
        )

        if findings_out is not None:
            findings_out.parent.mkdir(parents=True, exist_ok=True)
            with open(findings_out, "w", encoding="utf-8") as f:
                for finding in report.findings or []:
                    f.write(json.dumps(finding.to_dict(echo=echo), sort_keys=True) + "\n")
            logger.info(f"Wrote {report.grand_total} findings to {findings_out}")

        return PiiScanResponse(
            report=report.to_dict(),
            documents=len(corpus),
            findings_path=str(findings_out) if findings_out else None,
        )
