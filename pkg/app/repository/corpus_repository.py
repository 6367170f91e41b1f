"""Repository for reading and writing email corpora and alias tables."""

import csv
import json
import logging
import re
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from email.utils import parsedate_to_datetime
from pathlib import Path
from typing import IO, Any

from app.application.services.corpus_index import (
    AliasTable,
    Corpus,
    CorpusError,
    EmailDoc,
    Person,
    PersonId,
    Recipient,
    RecipientRole,
    normalize_address,
    resolve_alias,
)
from app.resources.config import DATA_DIR

logger = logging.getLogger(__name__)

csv.field_size_limit(min(sys.maxsize, 2**31 - 1))


class CorpusHeaderError(CorpusError):
    """Raised when the CSV header lacks a required column."""

    pass


@dataclass
class DropReason:
    """Why one input row was not ingested."""

    row: int  # 1-based data row number
    reason: str


@dataclass
class ParseReport:
    """Record-level ingest outcome."""

    rows_read: int = 0
    rows_dropped: int = 0
    drop_reasons: list[DropReason] = field(default_factory=list)

    def drop(self, row: int, reason: str) -> None:
        """Record a dropped row."""
        self.rows_dropped += 1
        self.drop_reasons.append(DropReason(row=row, reason=reason))
        logger.debug(f"Dropped row {row}: {reason}")

    def to_dict(self) -> dict[str, Any]:
        return {
            "rows_read": self.rows_read,
            "rows_dropped": self.rows_dropped,
            "drop_reasons": [asdict(d) for d in self.drop_reasons],
        }


class CorpusRepository:
    """Reads corpus CSV files into immutable, date-sorted corpora."""

    # Canonical column -> accepted header spellings
    COLUMN_SYNONYMS = {
        "id": ("id", "message_id", "mid", "doc_id"),
        "date": ("date",),
        "sender": ("sender", "from"),
        "recipients": ("recipients", "to"),
        "cc": ("cc",),
        "bcc": ("bcc",),
        "subject": ("subject",),
        "body": ("body",),
        "poi": ("poi",),
        "label": ("label", "responsive"),
    }
    REQUIRED_COLUMNS = ("date", "sender", "recipients", "subject", "body")
    TRUE_VALUES = frozenset({"1", "true", "yes", "y", "t"})

    _ADDRESS_SPLIT = re.compile(r"[;,]")

    def __init__(self, alias_table: AliasTable | None = None):
        """Initialize repository.

        Args:
            alias_table: Alias table used to resolve senders
        """
        self._alias_table = alias_table or AliasTable()

    def parse_corpus(self, stream: IO[str], format: str = "csv") -> tuple[Corpus, ParseReport]:
        """Parse a corpus CSV stream.

        Args:
            stream: Character stream with a header row
            format: Input format, only "csv" is supported

        Returns:
            Tuple of (Corpus sorted by date, ParseReport)

        Raises:
            CorpusHeaderError: If the header is missing or lacks required columns
            CorpusError: If the format is not supported
        """
        if format != "csv":
            raise CorpusError(f"Unsupported corpus format: {format}")

        reader = csv.reader(stream)
        try:
            header = next(reader)
        except StopIteration:
            raise CorpusHeaderError("Corpus stream is empty, expected a header row") from None
        except csv.Error as e:
            raise CorpusHeaderError(f"Unparseable header row: {e}") from e

        columns = self._map_header(header)
        report = ParseReport()
        docs: list[EmailDoc] = []
        row_number = 0

        while True:
            try:
                row = next(reader)
            except StopIteration:
                break
            except csv.Error as e:
                row_number += 1
                report.rows_read += 1
                report.drop(row_number, f"malformed_row: {e}")
                continue

            row_number += 1
            report.rows_read += 1
            if len(row) != len(header):
                report.drop(row_number, "malformed_row")
                continue

            doc, reason = self._row_to_doc(row, columns, row_number)
            if doc is None:
                report.drop(row_number, reason)
                continue
            docs.append(doc)

        # sorted() is stable: equal timestamps keep input order
        docs.sort(key=lambda d: d.date)

        logger.info(
            f"Ingested {len(docs)} documents ({report.rows_dropped} of "
            f"{report.rows_read} rows dropped)"
        )
        return Corpus(docs=tuple(docs), alias_table=self._alias_table), report

    def _map_header(self, header: list[str]) -> dict[str, int]:
        """Map canonical column names to header positions."""
        positions = {name.strip().lower().lstrip("\ufeff"): i for i, name in enumerate(header)}
        columns: dict[str, int] = {}
        for canonical, spellings in self.COLUMN_SYNONYMS.items():
            for spelling in spellings:
                if spelling in positions:
                    columns[canonical] = positions[spelling]
                    break

        missing = [c for c in self.REQUIRED_COLUMNS if c not in columns]
        if missing:
            raise CorpusHeaderError(
                f"Corpus header is missing required columns: {', '.join(missing)}"
            )
        return columns

    def _row_to_doc(
        self, row: list[str], columns: dict[str, int], row_number: int
    ) -> tuple[EmailDoc | None, str]:
        """Convert one CSV row, returning (doc, "") or (None, reason)."""

        def cell(name: str) -> str:
            index = columns.get(name)
            return row[index].strip() if index is not None else ""

        raw_date = cell("date")
        if not raw_date:
            return None, "missing_date"
        parsed = parse_date(raw_date)
        if parsed is None:
            return None, "unparseable_date"

        sender_raw = cell("sender")
        sender = resolve_alias(sender_raw, self._alias_table) if sender_raw else None
        if sender is None:
            return None, "missing_sender"

        recipients = self._parse_recipients(
            (cell("recipients"), RecipientRole.TO),
            (cell("cc"), RecipientRole.CC),
            (cell("bcc"), RecipientRole.BCC),
        )

        label = None
        raw_label = cell("label")
        if raw_label:
            try:
                label = int(float(raw_label))
            except ValueError:
                logger.debug(f"Row {row_number}: ignoring non-numeric label {raw_label!r}")

        doc = EmailDoc(
            id=cell("id") or f"row-{row_number}",
            date=parsed,
            sender_raw=sender_raw,
            sender=sender,
            recipients=recipients,
            subject=row[columns["subject"]],
            body=row[columns["body"]],
            poi_flag=cell("poi").lower() in self.TRUE_VALUES,
            label=label,
        )
        return doc, ""

    def _parse_recipients(self, *fields: tuple[str, RecipientRole]) -> tuple[Recipient, ...]:
        """Split ;/, separated address lists, deduplicated, first role wins."""
        seen: set[str] = set()
        recipients: list[Recipient] = []
        for raw, role in fields:
            for part in self._ADDRESS_SPLIT.split(raw):
                key = normalize_address(part) if part.strip() else ""
                if not key or key in seen:
                    continue
                seen.add(key)
                recipients.append(Recipient(address=key, role=role))
        return tuple(recipients)


def parse_date(raw: str) -> datetime | None:
    """Parse an RFC-2822 or ISO-8601 date into UTC at second resolution.

    Naive timestamps are taken as UTC.
    """
    raw = raw.strip()
    parsed: datetime | None = None
    try:
        parsed = datetime.fromisoformat(raw)
    except ValueError:
        try:
            parsed = parsedate_to_datetime(raw)
        except (TypeError, ValueError, IndexError):
            return None
    if parsed is None:
        return None

    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.astimezone(timezone.utc).replace(microsecond=0)


def export_corpus(corpus: Corpus, stream: IO[str]) -> None:
    """Write the corpus as key-sorted JSON lines, one document per line."""
    for doc in corpus.docs:
        record = {
            "id": doc.id,
            "date": doc.date.isoformat(),
            "sender_raw": doc.sender_raw,
            "sender": doc.sender,
            "recipients": [{"address": r.address, "role": r.role.value} for r in doc.recipients],
            "subject": doc.subject,
            "body": doc.body,
            "poi_flag": doc.poi_flag,
            "label": doc.label,
        }
        stream.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def load_alias_table(stream: IO[str]) -> AliasTable:
    """Load persons and aliases from CSV.

    Columns: person_id (optional), role (optional), first, last,
    primary_email, aliases (";"-separated, optional).

    Raises:
        CorpusHeaderError: If first/last/primary_email columns are missing
        CorpusError: If an alias is claimed twice
    """
    reader = csv.DictReader(stream)
    fieldnames = [f.strip().lower() for f in (reader.fieldnames or [])]
    missing = {"first", "last", "primary_email"} - set(fieldnames)
    if missing:
        raise CorpusHeaderError(f"Alias table is missing columns: {', '.join(sorted(missing))}")

    persons: dict[PersonId, Person] = {}
    aliases: dict[PersonId, list[str]] = {}
    for raw in reader:
        row = {k.strip().lower(): (v or "").strip() for k, v in raw.items() if k}
        person_id = PersonId(row.get("person_id") or f"{row['first']} {row['last']}".strip())
        persons[person_id] = Person(
            first=row["first"],
            last=row["last"],
            primary_email=row["primary_email"],
            role=row.get("role", ""),
        )
        aliases[person_id] = [a for a in row.get("aliases", "").split(";") if a.strip()]

    return AliasTable.build(persons, aliases)


def load_default_alias_table() -> AliasTable:
    """Built-in roster of persons of interest with their primary addresses."""
    with open(DATA_DIR / "poi_persons.csv", encoding="utf-8", newline="") as f:
        return load_alias_table(f)


def open_alias_table(path: Path | None) -> AliasTable:
    """Load an alias table file, falling back to the built-in roster."""
    if path is None:
        return load_default_alias_table()
    with open(path, encoding="utf-8", newline="") as f:
        return load_alias_table(f)


def open_corpus(path: Path, alias_table: AliasTable | None = None) -> tuple[Corpus, ParseReport]:
    """Parse a corpus CSV file."""
    with open(path, encoding="utf-8", errors="replace", newline="") as f:
        return CorpusRepository(alias_table).parse_corpus(f)
