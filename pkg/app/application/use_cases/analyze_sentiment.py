"""Use case for corpus sentiment: emotion radar, timeline and sender clusters."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from app.application.services.sentiment_analyzer import (
    Bucket,
    SentimentError,
    cluster_profiles,
    corpus_radar,
    sender_profiles,
    timeline,
)
from app.application.services.text_pipeline import PipelineConfig
from app.repository.corpus_repository import open_alias_table, open_corpus
from app.repository.lexicon_repository import LexiconRepository
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)


@dataclass
class SentimentResponse:
    radar: dict[str, float] | None
    timeline: list[dict[str, Any]]
    clusters: dict[str, Any] | None
    profiles: list[dict[str, Any]]
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "radar": self.radar,
            "timeline": self.timeline,
            "clusters": self.clusters,
            "profiles": self.profiles,
            "warnings": self.warnings,
        }


class AnalyzeSentimentUseCase:
    """Score every sender against the lexicons and summarize the corpus."""

    def __init__(self, executor: ScanExecutor | None = None):
        self._executor = executor

    def execute(
        self,
        corpus_path: Path,
        bucket: Bucket = Bucket.MONTH,
        valence_path: Path | None = None,
        emotion_path: Path | None = None,
        deception_path: Path | None = None,
        aliases_path: Path | None = None,
    ) -> SentimentResponse:
        """Analyze a corpus.

        A radar or cluster tree that cannot be built (no emotion matches, fewer
        than two scored senders) is reported as null with a warning.

        Args:
            corpus_path: Corpus CSV
            bucket: Timeline granularity
            valence_path: Valence lexicon (default: bundled fixture)
            emotion_path: Emotion lexicon (default: bundled fixture)
            deception_path: Deception term list (default: empty channel)
            aliases_path: Alias table

        Returns:
            SentimentResponse
        """
        corpus, _ = open_corpus(corpus_path, open_alias_table(aliases_path))
        lexicons = LexiconRepository.open_lexicon_set(valence_path, emotion_path, deception_path)
        config = PipelineConfig.sentiment()

        profiles = sender_profiles(corpus, config, lexicons, self._executor)
        warnings: list[str] = []

        try:
            radar = corpus_radar(profiles)
        except SentimentError as e:
            logger.warning(f"Radar skipped: {e}")
            warnings.append(f"radar: {e}")
            radar = None

        try:
            clusters = cluster_profiles(profiles)
        except SentimentError as e:
            logger.warning(f"Clustering skipped: {e}")
            warnings.append(f"clusters: {e}")
            clusters = None

        series = timeline(corpus, bucket, lexicons, config)
        logger.info(f"Sentiment: {len(profiles)} senders, {len(series)} {bucket.value} buckets")
        return SentimentResponse(
            radar=radar,
            timeline=[p.to_dict() for p in series],
            clusters=clusters,
            profiles=[p.to_dict() for p in profiles.values()],
            warnings=warnings,
        )
