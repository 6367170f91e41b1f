"""Text normalization, tokenization and Porter2 stemming."""

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from typing import IO

from nltk.stem.snowball import SnowballStemmer
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.resources.config import DATA_DIR

_DIGIT_RUN = re.compile(r"\d+")
_WHITESPACE = re.compile(r"\s+")

# Snowball "english" is the Porter2 algorithm
_STEMMER = SnowballStemmer("english")


def load_stopwords(stream: IO[str]) -> frozenset[str]:
    """Read a newline-delimited stopword file (blank lines ignored)."""
    return frozenset(line.strip().lower() for line in stream if line.strip())


@lru_cache
def default_stopwords() -> frozenset[str]:
    """Built-in 174-word English stopword list."""
    with open(DATA_DIR / "stopwords_en.txt", encoding="utf-8") as f:
        return load_stopwords(f)


class PipelineConfig(BaseModel):
    """Text normalization switches."""

    model_config = ConfigDict(frozen=True)

    lowercase: bool = True
    strip_punct: bool = True
    strip_numbers: bool = False
    stopword_list: frozenset[str] = Field(default_factory=default_stopwords)
    stem: bool = True

    @field_validator("stopword_list")
    @classmethod
    def _lowercase_stopwords(cls, value: frozenset[str]) -> frozenset[str]:
        # Matching happens after lowercasing
        return frozenset(w.lower() for w in value)

    @classmethod
    def ediscovery(cls, stopwords: frozenset[str] | None = None) -> "PipelineConfig":
        """Preset for document-term matrices: stemmed, numbers kept."""
        return cls(
            strip_numbers=False,
            stem=True,
            stopword_list=default_stopwords() if stopwords is None else stopwords,
        )

    @classmethod
    def sentiment(cls) -> "PipelineConfig":
        """Preset for lexicon scoring: surface words, numbers removed."""
        return cls(strip_numbers=True, stem=False, stopword_list=frozenset())


@dataclass(frozen=True)
class TokenStream:
    """Ordered tokens of one document."""

    tokens: tuple[str, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def join(self) -> str:
        return " ".join(self.tokens)


def _is_punct_or_symbol(ch: str) -> bool:
    return unicodedata.category(ch)[0] in ("P", "S")


def normalize(text: str, config: PipelineConfig) -> str:
    """Lowercase, blank out punctuation/symbols, drop digit runs, collapse spaces.

    Args:
        text: Raw text
        config: Normalization switches

    Returns:
        Normalized text with single spaces and no leading/trailing blanks
    """
    if config.lowercase:
        text = text.lower()
    if config.strip_punct:
        text = "".join(" " if _is_punct_or_symbol(ch) else ch for ch in text)
    if config.strip_numbers:
        text = _DIGIT_RUN.sub("", text)
    return _WHITESPACE.sub(" ", text).strip()


def tokenize(text: str) -> TokenStream:
    """Split on whitespace, never yielding empty tokens."""
    return TokenStream(tuple(text.split()))


def stem(token: str) -> str:
    """Porter2 (Snowball English) stem of a lowercase token."""
    return _STEMMER.stem(token)


def run_pipeline(text: str, config: PipelineConfig) -> TokenStream:
    """normalize -> tokenize -> stopword removal -> stem."""
    tokens = tokenize(normalize(text, config)).tokens
    if config.stopword_list:
        tokens = tuple(t for t in tokens if t not in config.stopword_list)
    if config.stem:
        tokens = tuple(stem(t) for t in tokens)
    return TokenStream(tokens)
