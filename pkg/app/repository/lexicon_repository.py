"""Repository for sentiment lexicons, stopword lists and driver's-license format tables."""

import csv
import logging
from pathlib import Path
from typing import IO

from app.application.services.pii_scanner import DlFormatTable, PiiError
from app.application.services.sentiment_analyzer import (
    EMOTIONS,
    Lexicon,
    LexiconKind,
    LexiconSet,
)
from app.application.services.text_pipeline import load_stopwords
from app.resources.config import DATA_DIR

logger = logging.getLogger(__name__)


class LexiconError(Exception):
    """Raised when a lexicon or format table file is invalid."""

    pass


class LexiconRepository:
    """Reads lexicon TSV files and lookup tables."""

    VALENCE_RANGE = (-5, 5)
    POLARITY_WORDS = {"positive": 1, "negative": -1}
    # NRC rows for these "emotions" are polarity, not one of the eight emotions
    NRC_POLARITY = frozenset({"positive", "negative"})

    DEFAULT_FILES = {
        LexiconKind.VALENCE: DATA_DIR / "afinn_fixture.tsv",
        LexiconKind.EMOTION: DATA_DIR / "nrc_fixture.tsv",
        LexiconKind.DECEPTION: DATA_DIR / "deception.txt",
    }

    @classmethod
    def load_lexicon(cls, stream: IO[str], kind: LexiconKind) -> Lexicon:
        """Parse a lexicon stream.

        Formats (tab-separated, '#' comments and blank lines skipped):
            valence: term<TAB>integer in [-5, 5], or term<TAB>positive|negative
            emotion: term<TAB>emotion, or term<TAB>emotion<TAB>0|1
            deception: one term per line

        Args:
            stream: Text stream
            kind: Lexicon kind

        Returns:
            Lexicon with lowercase terms

        Raises:
            LexiconError: On an out-of-range score, unknown emotion or malformed line
        """
        valence: dict[str, int] = {}
        emotion: dict[str, set[str]] = {}
        terms: set[str] = set()

        for lineno, raw in enumerate(stream, start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            term = parts[0].lower()
            if not term:
                raise LexiconError(f"Line {lineno}: empty term")

            if kind is LexiconKind.DECEPTION:
                terms.add(term)
            elif kind is LexiconKind.VALENCE:
                score = cls._valence_score(parts, lineno)
                if term in valence and valence[term] != score:
                    logger.warning(f"Line {lineno}: duplicate valence for {term!r}, last wins")
                valence[term] = score
            else:
                name = cls._emotion_name(parts, lineno)
                if name is not None:
                    emotion.setdefault(term, set()).add(name)

        lexicon = Lexicon(
            kind=kind,
            valence=valence,
            emotion={t: frozenset(es) for t, es in emotion.items()},
            terms=frozenset(terms),
        )
        logger.debug(f"Loaded {kind.value} lexicon with {len(lexicon)} terms")
        return lexicon

    @classmethod
    def _valence_score(cls, parts: list[str], lineno: int) -> int:
        if len(parts) < 2:
            raise LexiconError(f"Line {lineno}: expected term<TAB>score")
        raw = parts[1].lower()
        if raw in cls.POLARITY_WORDS:
            return cls.POLARITY_WORDS[raw]
        try:
            score = int(raw)
        except ValueError:
            raise LexiconError(f"Line {lineno}: score {parts[1]!r} is not an integer") from None
        low, high = cls.VALENCE_RANGE
        if not low <= score <= high:
            raise LexiconError(f"Line {lineno}: score {score} outside [{low}, {high}]")
        return score

    @classmethod
    def _emotion_name(cls, parts: list[str], lineno: int) -> str | None:
        if len(parts) < 2:
            raise LexiconError(f"Line {lineno}: expected term<TAB>emotion")
        name = parts[1].lower()
        if len(parts) >= 3 and parts[2] not in ("0", "1"):
            raise LexiconError(f"Line {lineno}: association flag must be 0 or 1")
        if name in cls.NRC_POLARITY or (len(parts) >= 3 and parts[2] == "0"):
            return None
        if name not in EMOTIONS:
            raise LexiconError(f"Line {lineno}: unknown emotion {parts[1]!r}")
        return name

    @classmethod
    def open_lexicon(cls, path: Path | None, kind: LexiconKind) -> Lexicon:
        """Load a lexicon file, falling back to the bundled fixture for the kind."""
        target = path or cls.DEFAULT_FILES[kind]
        try:
            with open(target, encoding="utf-8") as f:
                return cls.load_lexicon(f, kind)
        except LexiconError as e:
            raise LexiconError(f"{target}: {e}") from e

    @classmethod
    def open_lexicon_set(
        cls,
        valence_path: Path | None = None,
        emotion_path: Path | None = None,
        deception_path: Path | None = None,
    ) -> LexiconSet:
        return LexiconSet(
            valence=cls.open_lexicon(valence_path, LexiconKind.VALENCE),
            emotion=cls.open_lexicon(emotion_path, LexiconKind.EMOTION),
            deception=cls.open_lexicon(deception_path, LexiconKind.DECEPTION),
        )

    @classmethod
    def load_dl_formats(cls, stream: IO[str]) -> DlFormatTable:
        """Read a `state,pattern` CSV.

        Raises:
            LexiconError: On a missing column, duplicate state or empty pattern
        """
        reader = csv.DictReader(stream)
        if not reader.fieldnames or {"state", "pattern"} - {f.strip() for f in reader.fieldnames}:
            raise LexiconError("Driver's license table needs 'state' and 'pattern' columns")
        entries = tuple(
            ((row.get("state") or "").strip().upper(), (row.get("pattern") or "").strip())
            for row in reader
        )
        try:
            return DlFormatTable(entries=entries)
        except PiiError as e:
            raise LexiconError(str(e)) from e

    @classmethod
    def open_dl_formats(cls, path: Path | None) -> DlFormatTable:
        with open(path or DATA_DIR / "dl_formats.csv", encoding="utf-8", newline="") as f:
            return cls.load_dl_formats(f)

    @classmethod
    def open_stopwords(cls, path: Path | None) -> frozenset[str] | None:
        """Read a stopword file; None means the built-in list."""
        if path is None:
            return None
        with open(path, encoding="utf-8") as f:
            return load_stopwords(f)
