"""Shared fixtures: corpora, lexicons and planted-PII documents."""

import csv
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
import pytest

from app.application.services.corpus_index import (
    AliasTable,
    Corpus,
    EmailDoc,
    PersonId,
    Recipient,
)
from app.application.services.pii_scanner import PiiCategory, PiiConfig
from app.repository.corpus_repository import load_default_alias_table
from app.repository.lexicon_repository import LexiconRepository

CORPUS_HEADER = ["id", "date", "sender", "recipients", "subject", "body", "poi", "label"]

FILLER = (
    "lorem ipsum dolor sit amet consectetur adipiscing elit sed do eiusmod tempor "
    "incididunt ut labore et dolore magna aliqua"
)

NEUTRAL_WORDS = (
    "meeting lunch report schedule budget travel review golf weekend office "
    "printer holiday party coffee agenda memo draft calendar parking badge"
).split()
MARKER_WORDS = ("pipeline", "tariff", "outage")

BASE_DATE = datetime(2001, 1, 1, 9, 0, tzinfo=timezone.utc)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def make_doc(
    doc_id: str,
    body: str,
    sender: str = "someone@enron.com",
    date: datetime = BASE_DATE,
    subject: str = "Update",
    recipients: tuple[str, ...] = ("desk@enron.com",),
    poi_flag: bool = False,
    label: int | None = None,
) -> EmailDoc:
    return EmailDoc(
        id=doc_id,
        date=date,
        sender_raw=sender,
        sender=PersonId(sender),
        recipients=tuple(Recipient(address=r) for r in recipients),
        subject=subject,
        body=body,
        poi_flag=poi_flag,
        label=label,
    )


def write_corpus_csv(path: Path, rows: list[dict]) -> Path:
    """Write corpus rows (dicts keyed by CORPUS_HEADER names) as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CORPUS_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k, "") for k in CORPUS_HEADER})
    return path


def labeled_rows(n_docs: int = 200, n_responsive: int = 30, seed: int = 3) -> list[dict]:
    """Documents of neutral filler; the responsive ones also carry every marker word."""
    rng = np.random.default_rng(seed)
    responsive = set(rng.choice(n_docs, size=n_responsive, replace=False).tolist())
    rows = []
    for i in range(n_docs):
        words = list(rng.choice(NEUTRAL_WORDS, size=12))
        if i in responsive:
            words += list(MARKER_WORDS)
        rows.append(
            {
                "id": f"doc-{i:03d}",
                "date": (BASE_DATE + timedelta(hours=i)).isoformat(),
                "sender": f"trader{i % 7}@enron.com",
                "recipients": "desk@enron.com",
                "subject": "Note",
                "body": " ".join(words),
                "label": "1" if i in responsive else "0",
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Planted PII
# ---------------------------------------------------------------------------


def luhn_complete(payload: str) -> str:
    """Append the check digit that makes payload pass the mod-10 test."""
    total = 0
    for i, ch in enumerate(reversed(payload)):
        d = int(ch)
        if i % 2 == 0:
            d *= 2
            if d > 9:
                d -= 9
        total += d
    return payload + str((10 - total % 10) % 10)


def gb_iban(account: str) -> str:
    """GB IBAN with bank code WEST and a 14-digit account, check digits computed."""
    bban = "WEST" + account
    expanded = "".join(str(int(ch, 36)) for ch in bban + "GB00")
    check = 98 - int(expanded) % 97
    return f"GB{check:02d}{bban}"


MONTHS = ("January", "March", "May", "July", "September", "November")


def planted_item(category: PiiCategory, rng: np.random.Generator) -> str:
    """One sentence containing exactly one item of the category."""

    def digits(n: int) -> str:
        return "".join(str(d) for d in rng.integers(0, 10, size=n))

    if category is PiiCategory.SSN:
        area = int(rng.integers(1, 666))
        group = int(rng.integers(1, 100))
        serial = int(rng.integers(1, 10000))
        return f"my ssn is {area:03d}-{group:02d}-{serial:04d} ok"
    if category is PiiCategory.CREDIT_CARD:
        return f"charge card {luhn_complete('4' + digits(14))} today"
    if category is PiiCategory.PASSWORD_IN_URL:
        secret = "".join(rng.choice(list("abcdefghjkmnpqrstuvwxyz"), size=8))
        return f"login at https://mail.example.com/login?userid={digits(5)}&password={secret} now"
    if category is PiiCategory.PASSPORT:
        letters = "".join(rng.choice(list("ABCDEFGHJKLMNPRSTUVWXYZ"), size=2))
        return f"passport number {letters}{digits(7)} attached"
    if category is PiiCategory.DRIVERS_LICENSE:
        letter = str(rng.choice(list("ABCDEFGHJKLMNPRSTUVWXYZ")))
        return f"driver license {letter}{digits(7)} on file"
    if category is PiiCategory.IBAN:
        return f"wire to {gb_iban(digits(14))} please"
    if category is PiiCategory.DATE:
        day = int(rng.integers(1, 29))
        if rng.integers(0, 2):
            return f"due {int(rng.integers(1, 13)):02d}/{day:02d}/2001 firm"
        return f"due {MONTHS[int(rng.integers(0, len(MONTHS)))]} {day}, 2001 firm"
    if category is PiiCategory.PHONE:
        return f"call ({int(rng.integers(200, 1000))}) {int(rng.integers(200, 1000))}-{digits(4)}"
    raise ValueError(category)


def planted_corpus(per_category: int = 60, seed: int = 11) -> Corpus:
    """per_category documents for each reported category, one planted item each."""
    rng = np.random.default_rng(seed)
    docs = []
    categories = list(PiiCategory)[:8]
    for i in range(per_category):
        for category in categories:
            body = f"{FILLER} {planted_item(category, rng)} {FILLER}"
            docs.append(
                make_doc(
                    f"{category.value}-{i}",
                    body,
                    date=BASE_DATE + timedelta(minutes=len(docs)),
                )
            )
    return Corpus(docs=tuple(docs))


# ---------------------------------------------------------------------------
# Fixtures
# ---------------------------------------------------------------------------


@pytest.fixture
def alias_table() -> AliasTable:
    """Built-in person-of-interest roster."""
    return load_default_alias_table()


@pytest.fixture
def lexicons():
    """Bundled valence/emotion fixtures and the empty deception list."""
    return LexiconRepository.open_lexicon_set()


@pytest.fixture
def pii_config() -> PiiConfig:
    """Standard eight-category detector set with the bundled license table."""
    return PiiConfig.build(LexiconRepository.open_dl_formats(None))


@pytest.fixture
def labeled_corpus_csv(tmp_path: Path) -> Path:
    """200 labeled documents, 30 of them responsive."""
    return write_corpus_csv(tmp_path / "labeled.csv", labeled_rows())
