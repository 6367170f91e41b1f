"""Person-of-interest feature tables from insider-pay financials and email behaviour."""

import logging
from collections import defaultdict
from collections.abc import Collection, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from app.application.services.corpus_index import Corpus, PersonId, resolve_alias
from app.application.services.dataset import LabeledDataset
from app.application.services.sentiment_analyzer import EMOTIONS, EmotionProfile

logger = logging.getLogger(__name__)

POI_LABEL_NAME = "person of interest"
EMAIL_COLUMNS = (
    "to_messages",
    "from_messages",
    "to_poi",
    "from_poi",
    *EMOTIONS,
    "valence",
    "deception",
)


class PoiError(Exception):
    """Raised when person-level feature tables cannot be joined."""

    pass


class JoinMode(str, Enum):
    """Which feature blocks make up a POI row."""

    FINANCIAL_ONLY = "financial_only"
    COMBINED = "combined"
    EMAIL_ONLY = "email_only"


@dataclass(frozen=True)
class FinancialRecord:
    """Compensation figures of one person, blanks already filled."""

    person: PersonId
    features: Mapping[str, float]
    poi: bool = False


@dataclass
class EmailFeatures:
    """Message counts and sentiment totals of one person."""

    person: PersonId
    to_messages: int = 0
    from_messages: int = 0
    to_poi: int = 0
    from_poi: int = 0
    emotion_totals: dict[str, int] = field(default_factory=lambda: dict.fromkeys(EMOTIONS, 0))
    valence: int = 0
    deception: int = 0

    def feature_map(self) -> dict[str, float]:
        return {
            "to_messages": self.to_messages,
            "from_messages": self.from_messages,
            "to_poi": self.to_poi,
            "from_poi": self.from_poi,
            **self.emotion_totals,
            "valence": self.valence,
            "deception": self.deception,
        }

    def to_dict(self) -> dict[str, Any]:
        return {"person": self.person, **self.feature_map()}


def email_features(
    corpus: Corpus,
    poi_set: Collection[PersonId],
    profiles: Mapping[PersonId, EmotionProfile],
    persons: Iterable[PersonId] | None = None,
) -> list[EmailFeatures]:
    """Per-person message counts, restricted POI counts and copied sentiment totals.

    from_messages counts documents sent, to_messages documents received.
    to_poi counts sent documents with at least one POI recipient other than the
    sender; from_poi counts received documents from a POI other than the person.

    Args:
        corpus: Messages
        poi_set: Persons of interest
        profiles: Sender profiles supplying emotion, valence and deception totals
        persons: Restrict output to these persons (default: every sender and recipient)

    Returns:
        EmailFeatures sorted by person
    """
    sent: dict[PersonId, int] = defaultdict(int)
    received: dict[PersonId, int] = defaultdict(int)
    to_poi: dict[PersonId, int] = defaultdict(int)
    from_poi: dict[PersonId, int] = defaultdict(int)

    for doc in corpus.docs:
        recipients = {
            p
            for p in (resolve_alias(r.address, corpus.alias_table) for r in doc.recipients)
            if p is not None
        }
        sent[doc.sender] += 1
        if any(p in poi_set and p != doc.sender for p in recipients):
            to_poi[doc.sender] += 1
        for person in recipients:
            received[person] += 1
            if doc.sender in poi_set and doc.sender != person:
                from_poi[person] += 1

    wanted = sorted(set(persons) if persons is not None else set(sent) | set(received))
    features = []
    for person in wanted:
        profile = profiles.get(person)
        features.append(
            EmailFeatures(
                person=person,
                to_messages=received.get(person, 0),
                from_messages=sent.get(person, 0),
                to_poi=to_poi.get(person, 0),
                from_poi=from_poi.get(person, 0),
                emotion_totals=dict(profile.counts) if profile else dict.fromkeys(EMOTIONS, 0),
                valence=profile.valence_sum if profile else 0,
                deception=profile.deception if profile else 0,
            )
        )
    return features


def _unique(items: Sequence, what: str) -> dict[PersonId, Any]:
    keyed: dict[PersonId, Any] = {}
    for item in items:
        if item.person in keyed:
            raise PoiError(f"Duplicate person {item.person!r} in {what}")
        keyed[item.person] = item
    return keyed


def join_features(
    fin: Sequence[FinancialRecord],
    email: Sequence[EmailFeatures],
    mode: JoinMode = JoinMode.COMBINED,
    poi_set: Collection[PersonId] = (),
) -> LabeledDataset:
    """One labeled row per person.

    financial_only rows are the financial persons, email_only rows the email
    persons and combined rows their union with missing blocks zero-filled.
    Labels come from the financial poi flag, else membership in poi_set.

    Raises:
        PoiError: On a duplicate person or inconsistent financial columns
    """
    fin_by_person = _unique(fin, "financial records")
    email_by_person = _unique(email, "email features")

    fin_columns: tuple[str, ...] = tuple(fin[0].features) if fin else ()
    for record in fin:
        if set(record.features) != set(fin_columns):
            raise PoiError(f"Financial columns of {record.person!r} differ from the first record")

    if mode is JoinMode.FINANCIAL_ONLY:
        persons, columns = sorted(fin_by_person), fin_columns
    elif mode is JoinMode.EMAIL_ONLY:
        persons, columns = sorted(email_by_person), EMAIL_COLUMNS
    else:
        persons = sorted(set(fin_by_person) | set(email_by_person))
        columns = fin_columns + EMAIL_COLUMNS

    rows = []
    for person in persons:
        values: dict[str, float] = {}
        record = fin_by_person.get(person)
        if record is not None:
            values.update(record.features)
        if person in email_by_person:
            values.update(email_by_person[person].feature_map())
        label = record.poi if record is not None else person in poi_set
        rows.append(([float(values.get(c, 0.0)) for c in columns], int(label)))

    ds = LabeledDataset.from_rows(columns, rows, POI_LABEL_NAME, row_ids=persons)
    logger.info(
        f"Joined {mode.value} POI table: {len(ds)} persons x {len(columns)} features, "
        f"{ds.n_positive} POIs"
    )
    return ds
