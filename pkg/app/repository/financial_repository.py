"""Repository for insider-pay financial tables."""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Any

import pandas as pd

from app.application.services.corpus_index import PersonId
from app.application.services.poi_features import FinancialRecord

logger = logging.getLogger(__name__)


class FinancialsError(Exception):
    """Raised when a financial table is structurally invalid."""

    pass


class FillStrategy(str, Enum):
    """Replacement for blank cells."""

    ZERO = "zero"
    MEDIAN = "median"
    MEAN = "mean"


@dataclass
class RowError:
    row: int  # 1-based data row number
    column: str
    value: str


@dataclass
class LoadReport:
    """Record-level outcome of a financial load."""

    rows_read: int = 0
    rows_dropped: int = 0
    cells: int = 0
    blank_cells: int = 0
    negative_cells: int = 0
    errors: list[RowError] = field(default_factory=list)

    @property
    def blank_fraction(self) -> float:
        return self.blank_cells / self.cells if self.cells else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "cells": self.cells,
            "blank_cells": self.blank_cells,
            "blank_fraction": self.blank_fraction,
            "negative_cells": self.negative_cells,
            "errors": [asdict(e) for e in self.errors],
        }


class FinancialRepository:
    """Reads `person,poi,<numeric...>` CSV tables into FinancialRecords."""

    PERSON_COLUMNS = ("person", "person_id", "name", "unnamed: 0")
    POI_COLUMN = "poi"
    TEXT_COLUMNS = frozenset({"email_address", "email"})
    BLANKS = frozenset({"", "nan", "na", "n/a", "null", "none", "-"})
    TRUE_VALUES = frozenset({"1", "true", "yes", "y", "t", "1.0"})

    def load_financials(
        self, stream: IO[str], fill: FillStrategy = FillStrategy.ZERO
    ) -> tuple[list[FinancialRecord], LoadReport]:
        """Parse a financial CSV stream.

        Blank cells are filled per strategy (median and mean over the column's
        non-blank values). Negative amounts are stored as magnitudes. A row with
        a non-numeric cell, or a repeated person, is dropped and reported.

        Args:
            stream: CSV text with a header row
            fill: Blank-fill strategy

        Returns:
            Tuple of (records in input order, LoadReport)

        Raises:
            FinancialsError: If the person or poi column is missing
        """
        try:
            frame = pd.read_csv(stream, dtype=str, keep_default_na=False, skipinitialspace=True)
        except (pd.errors.EmptyDataError, pd.errors.ParserError) as e:
            raise FinancialsError(f"Unreadable financial table: {e}") from e

        frame.columns = [str(c).strip().lower() for c in frame.columns]
        person_col = next((c for c in self.PERSON_COLUMNS if c in frame.columns), None)
        if person_col is None:
            raise FinancialsError("Financial table has no person column")
        if self.POI_COLUMN not in frame.columns:
            raise FinancialsError("Financial table has no poi column")

        numeric = [
            c
            for c in frame.columns
            if c not in (person_col, self.POI_COLUMN) and c not in self.TEXT_COLUMNS
        ]
        report = LoadReport(rows_read=len(frame))

        parsed: list[tuple[PersonId, bool, dict[str, float | None]]] = []
        seen: set[str] = set()
        for i, row in enumerate(frame.itertuples(index=False), start=1):
            record = dict(zip(frame.columns, row))
            person = record[person_col].strip()
            if not person or person in seen:
                report.rows_dropped += 1
                report.errors.append(RowError(i, person_col, person or "<blank>"))
                continue

            values, bad = self._parse_row(record, numeric, i, report)
            if bad:
                report.rows_dropped += 1
                continue
            seen.add(person)
            poi = record[self.POI_COLUMN].strip().lower() in self.TRUE_VALUES
            parsed.append((PersonId(person), poi, values))

        fills = self._fill_values(parsed, numeric, fill)
        records = []
        for person, poi, values in parsed:
            report.cells += len(numeric)
            report.blank_cells += sum(1 for v in values.values() if v is None)
            features = {c: fills[c] if values[c] is None else values[c] for c in numeric}
            records.append(FinancialRecord(person=person, features=features, poi=poi))

        logger.info(
            f"Loaded {len(records)} financial records ({report.rows_dropped} dropped, "
            f"{report.blank_fraction:.1%} blank cells filled with {fill.value})"
        )
        return records, report

    def _parse_row(
        self, record: dict[str, str], numeric: list[str], row: int, report: LoadReport
    ) -> tuple[dict[str, float | None], bool]:
        values: dict[str, float | None] = {}
        bad = False
        for column in numeric:
            raw = record[column].strip()
            if raw.lower() in self.BLANKS:
                values[column] = None
                continue
            try:
                value = float(raw.replace("$", "").replace(",", ""))
            except ValueError:
                report.errors.append(RowError(row, column, raw))
                logger.debug(f"Row {row}: non-numeric {column}={raw!r}")
                bad = True
                continue
            if value < 0:
                report.negative_cells += 1
                value = -value
            values[column] = value
        return values, bad

    @staticmethod
    def _fill_values(
        parsed: list[tuple[PersonId, bool, dict[str, float | None]]],
        numeric: list[str],
        fill: FillStrategy,
    ) -> dict[str, float]:
        if fill is FillStrategy.ZERO:
            return dict.fromkeys(numeric, 0.0)
        fills = {}
        for column in numeric:
            present = pd.Series([v[column] for _, _, v in parsed if v[column] is not None])
            if present.empty:
                fills[column] = 0.0
            elif fill is FillStrategy.MEDIAN:
                fills[column] = float(present.median())
            else:
                fills[column] = float(present.mean())
        return fills

    def open_financials(
        self, path: Path, fill: FillStrategy = FillStrategy.ZERO
    ) -> tuple[list[FinancialRecord], LoadReport]:
        with open(path, encoding="utf-8", newline="") as f:
            return self.load_financials(f, fill)
