"""Lexicon-based valence and emotion scoring, sender profiles, timelines and clustering."""

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import partial
from typing import Any

import numpy as np
import pandas as pd
from scipy.cluster.hierarchy import ClusterNode, linkage, to_tree

from app.application.services.corpus_index import Corpus, EmailDoc, PersonId
from app.application.services.text_pipeline import PipelineConfig, TokenStream, run_pipeline
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)

EMOTIONS = ("anger", "fear", "anticipation", "trust", "surprise", "sadness", "joy", "disgust")


class SentimentError(Exception):
    """Raised when profiles cannot be aggregated or clustered."""

    pass


class LexiconKind(str, Enum):
    """What a lexicon file scores."""

    VALENCE = "valence"
    EMOTION = "emotion"
    DECEPTION = "deception"


@dataclass(frozen=True)
class Lexicon:
    """Term scores of one kind; terms are lowercase surface words."""

    kind: LexiconKind
    valence: Mapping[str, int] = field(default_factory=dict)
    emotion: Mapping[str, frozenset[str]] = field(default_factory=dict)
    terms: frozenset[str] = frozenset()

    def __len__(self) -> int:
        if self.kind is LexiconKind.VALENCE:
            return len(self.valence)
        if self.kind is LexiconKind.EMOTION:
            return len(self.emotion)
        return len(self.terms)


@dataclass(frozen=True)
class LexiconSet:
    """Lexicons applied together; any may be absent."""

    valence: Lexicon | None = None
    emotion: Lexicon | None = None
    deception: Lexicon | None = None


@dataclass
class EmotionProfile:
    """Accumulated scores of one sender (or one time bucket)."""

    person: PersonId
    counts: dict[str, int] = field(default_factory=lambda: dict.fromkeys(EMOTIONS, 0))
    valence_sum: int = 0
    token_total: int = 0
    deception: int = 0

    @property
    def normalized(self) -> dict[str, float]:
        """counts / token_total, 0 when there are no tokens."""
        if self.token_total == 0:
            return dict.fromkeys(EMOTIONS, 0.0)
        return {e: self.counts[e] / self.token_total for e in EMOTIONS}

    @property
    def emotion_total(self) -> int:
        return sum(self.counts.values())

    def add_tokens(self, tokens: TokenStream, lexicons: LexiconSet) -> None:
        self.token_total += len(tokens)
        if lexicons.valence is not None:
            self.valence_sum += score_valence(tokens, lexicons.valence)
        if lexicons.emotion is not None:
            for e, n in score_emotions(tokens, lexicons.emotion).items():
                self.counts[e] += n
        if lexicons.deception is not None:
            self.deception += score_deception(tokens, lexicons.deception)

    def merge(self, other: "EmotionProfile") -> "EmotionProfile":
        return EmotionProfile(
            person=self.person,
            counts={e: self.counts[e] + other.counts[e] for e in EMOTIONS},
            valence_sum=self.valence_sum + other.valence_sum,
            token_total=self.token_total + other.token_total,
            deception=self.deception + other.deception,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "person": self.person,
            "counts": dict(self.counts),
            "normalized": self.normalized,
            "valence_sum": self.valence_sum,
            "token_total": self.token_total,
            "deception": self.deception,
        }


def score_valence(tokens: TokenStream, lex: Lexicon) -> int:
    """Sum of valence over matched tokens."""
    return sum(lex.valence.get(t, 0) for t in tokens)


def score_emotions(tokens: TokenStream, lex: Lexicon) -> dict[str, int]:
    """Per-emotion match counts; a token tied to k emotions bumps k counters."""
    counts = dict.fromkeys(EMOTIONS, 0)
    for t in tokens:
        for e in lex.emotion.get(t, ()):
            counts[e] += 1
    return counts


def score_deception(tokens: TokenStream, lex: Lexicon) -> int:
    return sum(1 for t in tokens if t in lex.terms)


def _merge_profile_maps(
    a: dict[PersonId, EmotionProfile], b: dict[PersonId, EmotionProfile]
) -> dict[PersonId, EmotionProfile]:
    merged = dict(a)
    for person, profile in b.items():
        merged[person] = merged[person].merge(profile) if person in merged else profile
    return merged


def _profile_shard(
    config: PipelineConfig, lexicons: LexiconSet, docs: Sequence[EmailDoc]
) -> dict[PersonId, EmotionProfile]:
    profiles: dict[PersonId, EmotionProfile] = {}
    for doc in docs:
        profile = profiles.setdefault(doc.sender, EmotionProfile(person=doc.sender))
        profile.add_tokens(run_pipeline(doc.text, config), lexicons)
    return profiles


def sender_profiles(
    corpus: Corpus,
    config: PipelineConfig,
    lexicons: LexiconSet,
    executor: ScanExecutor | None = None,
) -> dict[PersonId, EmotionProfile]:
    """Score every sender's subject and body text.

    Args:
        corpus: Documents to score
        config: Token pipeline (normally PipelineConfig.sentiment())
        lexicons: Valence, emotion and deception lexicons
        executor: Shard executor

    Returns:
        Profiles keyed by sender, sorted by person id
    """
    executor = executor or ScanExecutor()
    profiles = executor.run(
        corpus.docs, partial(_profile_shard, config, lexicons), _merge_profile_maps, {}
    )
    logger.info(f"Built {len(profiles)} sender profiles from {len(corpus)} documents")
    return dict(sorted(profiles.items()))


def corpus_radar(profiles: Mapping[PersonId, EmotionProfile]) -> dict[str, float]:
    """Emotion totals over all profiles as shares of the grand total.

    Raises:
        SentimentError: If no profile has any emotion count
    """
    totals = {e: sum(p.counts[e] for p in profiles.values()) for e in EMOTIONS}
    grand = sum(totals.values())
    if grand == 0:
        raise SentimentError("No emotion terms matched in any profile")
    return {e: n / grand for e, n in totals.items()}


class Bucket(str, Enum):
    """Calendar granularity of a timeline."""

    WEEK = "week"
    MONTH = "month"

    @property
    def freq(self) -> str:
        return "W" if self is Bucket.WEEK else "M"


@dataclass
class TimelinePoint:
    period: str
    vector: dict[str, int]
    valence: int
    deception: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "period": self.period,
            "vector": self.vector,
            "valence": self.valence,
            "deception": self.deception,
        }


def timeline(
    corpus: Corpus,
    bucket: Bucket,
    lexicons: LexiconSet,
    config: PipelineConfig | None = None,
) -> list[TimelinePoint]:
    """Per-period emotion counts and valence over a continuous calendar axis.

    Periods with no mail are present with zero scores.
    """
    config = config or PipelineConfig.sentiment()
    columns = [*EMOTIONS, "valence", "deception"]
    rows = []
    for doc in corpus.docs:
        profile = EmotionProfile(person=doc.sender)
        profile.add_tokens(run_pipeline(doc.text, config), lexicons)
        period = pd.Period(doc.date.replace(tzinfo=None), freq=bucket.freq)
        rows.append([period, *profile.counts.values(), profile.valence_sum, profile.deception])
    if not rows:
        return []

    frame = pd.DataFrame(rows, columns=["period", *columns])
    totals = frame.groupby("period")[columns].sum()
    axis = pd.period_range(totals.index.min(), totals.index.max(), freq=bucket.freq)
    totals = totals.reindex(axis, fill_value=0)

    return [
        TimelinePoint(
            period=str(period),
            vector={e: int(row[e]) for e in EMOTIONS},
            valence=int(row["valence"]),
            deception=int(row["deception"]),
        )
        for period, row in totals.iterrows()
    ]


def _dendrogram(node: ClusterNode, persons: Sequence[PersonId]) -> dict[str, Any]:
    if node.is_leaf():
        return {"person": persons[node.get_id()]}
    return {
        "left": _dendrogram(node.get_left(), persons),
        "right": _dendrogram(node.get_right(), persons),
        "height": float(node.dist),
    }


def cluster_profiles(
    profiles: Mapping[PersonId, EmotionProfile],
    method: str = "average",
    metric: str = "cosine",
) -> dict[str, Any]:
    """Agglomerative clustering of senders by emotional style.

    Each sender is the 8 normalized emotion shares plus min-max scaled valence.
    Profiles without any emotion match are left out; the rest are ordered by
    person id before clustering.

    Raises:
        SentimentError: If fewer than two profiles remain
    """
    usable = sorted(
        (p for p in profiles.values() if p.token_total > 0 and p.emotion_total > 0),
        key=lambda p: p.person,
    )
    if len(usable) < 2:
        raise SentimentError(f"Need at least 2 profiles with emotion matches, got {len(usable)}")

    emotions = np.array([[p.normalized[e] for e in EMOTIONS] for p in usable])
    valence = np.array([p.valence_sum for p in usable], dtype=float)
    spread = valence.max() - valence.min()
    scaled = (valence - valence.min()) / spread if spread > 0 else np.zeros_like(valence)

    merges = linkage(np.column_stack([emotions, scaled]), method=method, metric=metric)
    return _dendrogram(to_tree(merges), [p.person for p in usable])
