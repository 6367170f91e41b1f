"""Normalization, tokenization, stemming and the composed pipeline."""

import io
from pathlib import Path

import pytest

from app.application.services.text_pipeline import (
    PipelineConfig,
    default_stopwords,
    load_stopwords,
    normalize,
    run_pipeline,
    stem,
    tokenize,
)

PORTER2_SAMPLE = Path(__file__).parent / "data" / "porter2_sample.tsv"


def porter2_pairs() -> list[tuple[str, str]]:
    """word<TAB>stem lines; # starts a comment."""
    lines = PORTER2_SAMPLE.read_text(encoding="utf-8").splitlines()
    return [tuple(line.split("\t")) for line in lines if line and not line.startswith("#")]


@pytest.fixture
def plain() -> PipelineConfig:
    """No stopwords, no stemming."""
    return PipelineConfig(stopword_list=frozenset(), stem=False)


class TestNormalize:
    """Character-level cleanup."""

    def test_lowercase_and_punctuation(self, plain):
        """Punctuation turns into spaces that collapse."""
        assert normalize("Bid NOW!!", plain) == "bid now"

    def test_strip_numbers(self):
        """Digit runs disappear when requested."""
        config = PipelineConfig(strip_numbers=True, stopword_list=frozenset())
        assert normalize("call 555-1212 today", config) == "call today"

    def test_numbers_kept_by_default(self, plain):
        """E-discovery keeps numbers."""
        assert normalize("call 555-1212 today", plain) == "call 555 1212 today"

    def test_empty(self, plain):
        """Identity on empty text."""
        assert normalize("", plain) == ""

    def test_symbols_split_words(self, plain):
        """word1.word2 does not merge."""
        assert normalize("gas.price$up", plain) == "gas price up"


class TestTokenize:
    """Whitespace splitting."""

    @pytest.mark.parametrize(
        "text,expected",
        [("a b  c", ("a", "b", "c")), ("", ()), ("bid bid bid", ("bid", "bid", "bid"))],
    )
    def test_split(self, text, expected):
        """No empty tokens."""
        assert tokenize(text).tokens == expected


class TestStem:
    """Porter2 stemming."""

    @pytest.mark.parametrize(
        "word,expected",
        [
            ("bidding", "bid"),
            ("bid", "bid"),
            ("tortures", "tortur"),
            ("california", "california"),
            ("generously", "generous"),
            ("skies", "sky"),
        ],
    )
    def test_reference_pairs(self, word, expected):
        """Known Snowball English outputs."""
        assert stem(word) == expected

    def test_sample_has_enough_pairs(self):
        """The vocabulary sample holds at least a thousand words."""
        pairs = porter2_pairs()
        assert len(pairs) >= 1000
        assert len({word for word, _ in pairs}) == len(pairs)

    @pytest.mark.parametrize("word,expected", porter2_pairs(), ids=lambda v: v)
    def test_vocabulary_sample(self, word, expected):
        """Every sampled word stems to its Snowball English output."""
        assert stem(word) == expected

    @pytest.mark.parametrize(
        "word,once,twice", [("agreed", "agre", "agr"), ("feed", "feed", "feed")]
    )
    def test_restemming_can_shorten(self, word, once, twice):
        """Stems are not always fixpoints: 'agre' loses its final e on a second pass."""
        assert stem(word) == once
        assert stem(once) == twice


class TestRunPipeline:
    """normalize -> tokenize -> stopwords -> stem."""

    def test_worked_example(self):
        """Stopwords drop before stemming."""
        config = PipelineConfig(stopword_list=frozenset({"the", "was"}))
        assert run_pipeline("The bidding was IMMENSE", config).tokens == ("bid", "immens")

    def test_all_stopwords(self):
        """Everything filtered."""
        config = PipelineConfig(stopword_list=frozenset({"the", "a"}))
        assert run_pipeline("The a THE", config).tokens == ()

    def test_deterministic(self):
        """Repeated calls agree."""
        config = PipelineConfig.ediscovery()
        text = "Bidding on California power, demand is rising!"
        assert run_pipeline(text, config) == run_pipeline(text, config)

    def test_idempotent_on_ordinary_stems(self):
        """Rejoined stems of ordinary words come back unchanged; see test_restemming_can_shorten."""
        config = PipelineConfig.ediscovery()
        text = "Traders were bidding aggressively into the California markets"
        once = run_pipeline(text, config)
        assert run_pipeline(once.join(), config) == once

    def test_token_count_never_grows(self):
        """Stopword removal and stemming only shrink the stream."""
        config = PipelineConfig.ediscovery()
        text = "It is what it is, and the bids are the bids"
        assert len(run_pipeline(text, config)) <= len(tokenize(normalize(text, config)))

    def test_stopwords_matched_after_lowercasing(self):
        """Upper-case stopword entries still match."""
        config = PipelineConfig(stopword_list=frozenset({"THE"}), stem=False)
        assert run_pipeline("The end", config).tokens == ("end",)


class TestPresets:
    """Named configurations."""

    def test_ediscovery_keeps_numbers_and_stems(self):
        """Numbers survive, words are stemmed."""
        tokens = run_pipeline("Bidding 2001", PipelineConfig.ediscovery()).tokens
        assert tokens == ("bid", "2001")

    def test_sentiment_surface_words(self):
        """Unstemmed, no stopwords, no numbers."""
        tokens = run_pipeline("The fraud of 2001", PipelineConfig.sentiment()).tokens
        assert tokens == ("the", "fraud", "of")

    def test_builtin_stopword_list(self):
        """174 entries including the obvious ones."""
        words = default_stopwords()
        assert len(words) == 174
        assert {"the", "a", "and"} <= words

    def test_load_stopwords_skips_blanks(self):
        """One lowercase term per line."""
        assert load_stopwords(io.StringIO("The\n\n  of \n")) == frozenset({"the", "of"})
