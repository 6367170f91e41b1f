"""Email corpus domain types, alias resolution and corpus statistics."""

import logging
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, datetime
from email.utils import parseaddr
from enum import Enum
from typing import NewType

logger = logging.getLogger(__name__)

PersonId = NewType("PersonId", str)


class CorpusError(Exception):
    """Raised when a corpus or alias table is structurally invalid."""

    pass


class RecipientRole(str, Enum):
    """Addressing role of a recipient."""

    TO = "to"
    CC = "cc"
    BCC = "bcc"


@dataclass(frozen=True)
class Recipient:
    """One addressee of a message."""

    address: str
    role: RecipientRole = RecipientRole.TO


@dataclass(frozen=True)
class EmailDoc:
    """One message of the corpus."""

    id: str
    date: datetime  # UTC, second resolution
    sender_raw: str
    sender: PersonId
    recipients: tuple[Recipient, ...] = ()
    subject: str = ""
    body: str = ""
    poi_flag: bool = False
    label: int | None = None  # expert relevance score, seed sets only

    @property
    def text(self) -> str:
        """Subject and body joined, the unit scanned by analyzers."""
        return f"{self.subject}\n{self.body}"


@dataclass(frozen=True)
class Person:
    """Canonical person behind a set of addresses."""

    first: str
    last: str
    primary_email: str
    role: str = ""


@dataclass(frozen=True)
class AliasTable:
    """Case-insensitive address -> person mapping."""

    entries: dict[str, PersonId] = field(default_factory=dict)
    persons: dict[PersonId, Person] = field(default_factory=dict)

    @classmethod
    def build(
        cls,
        persons: dict[PersonId, Person],
        aliases: dict[PersonId, list[str]] | None = None,
    ) -> "AliasTable":
        """Build a table from persons and their extra aliases.

        Args:
            persons: Canonical persons keyed by id
            aliases: Additional addresses per person

        Returns:
            AliasTable where every primary email maps to its person

        Raises:
            CorpusError: If one address is claimed by two persons
        """
        entries: dict[str, PersonId] = {}
        for person_id, person in persons.items():
            addresses = [person.primary_email, *(aliases or {}).get(person_id, [])]
            for address in addresses:
                key = normalize_address(address)
                if not key:
                    continue
                owner = entries.setdefault(key, person_id)
                if owner != person_id:
                    raise CorpusError(
                        f"Alias {key!r} maps to both {owner!r} and {person_id!r}"
                    )
        return cls(entries=entries, persons=dict(persons))

    def lookup(self, address: str) -> PersonId | None:
        """Exact case-insensitive lookup; None for unknown addresses."""
        return self.entries.get(normalize_address(address))


@dataclass(frozen=True)
class Corpus:
    """Chronologically ordered, immutable collection of messages."""

    docs: tuple[EmailDoc, ...]
    alias_table: AliasTable = field(default_factory=AliasTable)

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self):
        return iter(self.docs)


@dataclass
class CorpusStats:
    """Corpus-level counts feeding the Benford checks."""

    doc_count: int = 0
    total_words: int = 0
    per_sender_counts: dict[PersonId, int] = field(default_factory=dict)
    daily_counts: dict[date, int] = field(default_factory=dict)
    body_lengths: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        """JSON-ready form with ISO day keys."""
        return {
            "doc_count": self.doc_count,
            "total_words": self.total_words,
            "unique_senders": len(self.per_sender_counts),
            "per_sender_counts": dict(sorted(self.per_sender_counts.items())),
            "daily_counts": {d.isoformat(): n for d, n in sorted(self.daily_counts.items())},
        }


def normalize_address(address: str) -> str:
    """Lowercase bare address, stripping any display name."""
    _, bare = parseaddr(address.strip())
    return (bare or address).strip().lower()


def resolve_alias(address: str, table: AliasTable) -> PersonId | None:
    """Resolve an address to its canonical person.

    Unknown addresses get a synthesized id keyed by the normalized address,
    so repeated calls agree without mutating the table.

    Args:
        address: Raw address, optionally with a display name
        table: Alias table

    Returns:
        PersonId, or None for a blank address
    """
    key = normalize_address(address)
    if not key:
        return None
    return table.lookup(key) or PersonId(key)


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Compute document, word, sender and per-day counts."""
    per_sender: Counter[PersonId] = Counter()
    daily: Counter[date] = Counter()
    total_words = 0
    body_lengths: list[int] = []

    for doc in corpus.docs:
        per_sender[doc.sender] += 1
        daily[doc.date.date()] += 1
        total_words += len(doc.subject.split()) + len(doc.body.split())
        body_lengths.append(len(doc.body))

    return CorpusStats(
        doc_count=len(corpus.docs),
        total_words=total_words,
        per_sender_counts=dict(per_sender),
        daily_counts=dict(daily),
        body_lengths=body_lengths,
    )
