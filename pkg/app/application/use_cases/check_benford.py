"""Use case for Benford first-digit checks on corpus statistics or a value file."""

import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import pandas as pd

from app.application.services.benford_analyzer import BenfordAnalyzer
from app.application.services.corpus_index import corpus_stats
from app.repository.corpus_repository import open_alias_table, open_corpus

logger = logging.getLogger(__name__)


class Series(str, Enum):
    """Which numbers to test."""

    BODY_LENGTH = "body_length"
    DAILY_COUNT = "daily_count"
    FILE = "file"


@dataclass
class BenfordResponse:
    series: Series
    source: str
    report: dict[str, Any]

    def to_dict(self) -> dict[str, Any]:
        return {"series": self.series.value, "source": self.source, **self.report}


def load_values(path: Path) -> list[float]:
    """Numbers from the first column of a headerless file; unparseable cells are skipped."""
    frame = pd.read_csv(path, header=None, usecols=[0], dtype=str, skip_blank_lines=True)
    values = pd.to_numeric(frame[0].str.strip(), errors="coerce").dropna()
    skipped = len(frame) - len(values)
    if skipped:
        logger.info(f"Skipped {skipped} non-numeric lines in {path}")
    return values.astype(float).tolist()


class CheckBenfordUseCase:
    """Benford conformity of message body lengths, daily volumes or arbitrary values."""

    def execute(
        self,
        series: Series,
        corpus_path: Path | None = None,
        values_path: Path | None = None,
        aliases_path: Path | None = None,
    ) -> BenfordResponse:
        """Run a conformity check.

        Args:
            series: body_length or daily_count (need a corpus) or file (needs values)
            corpus_path: Corpus CSV
            values_path: One number per line
            aliases_path: Alias table

        Returns:
            BenfordResponse

        Raises:
            ValueError: If the input the series needs is missing
        """
        if series is Series.FILE:
            if values_path is None:
                raise ValueError("--values-file is required for --series file")
            values, source = load_values(values_path), str(values_path)
        else:
            if corpus_path is None:
                raise ValueError(f"--corpus is required for --series {series.value}")
            corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
            stats = corpus_stats(corpus)
            if series is Series.BODY_LENGTH:
                values = [float(n) for n in stats.body_lengths]
            else:
                values = [float(n) for _, n in sorted(stats.daily_counts.items())]
            source = str(corpus_path)

        report = BenfordAnalyzer.conformity(values)
        logger.info(
            f"Benford {series.value}: n={report.distribution.n}, verdict {report.verdict.value}"
        )
        return BenfordResponse(series=series, source=source, report=report.to_dict())
