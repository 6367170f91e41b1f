"""Lexicon, stopword and license-format files."""

import io

import pytest

from app.application.services.sentiment_analyzer import LexiconKind
from app.repository.lexicon_repository import LexiconError, LexiconRepository


def lexicon(text: str, kind: LexiconKind):
    return LexiconRepository.load_lexicon(io.StringIO(text), kind)


class TestValence:
    """term<TAB>score."""

    def test_integer_and_polarity_scores(self):
        """Words map to +1/-1, terms are lowercased."""
        lex = lexicon("# comment\nGood\t3\nbad\tnegative\n\nfine\tpositive\n", LexiconKind.VALENCE)
        assert dict(lex.valence) == {"good": 3, "bad": -1, "fine": 1}
        assert len(lex) == 3

    @pytest.mark.parametrize("line", ["huge\t6", "odd\tmaybe", "lonely"])
    def test_bad_lines(self, line):
        """Out of range, not a number, missing score."""
        with pytest.raises(LexiconError):
            lexicon(line + "\n", LexiconKind.VALENCE)


class TestEmotion:
    """term<TAB>emotion[<TAB>flag]."""

    def test_association_flags_and_polarity_rows(self):
        """Zero flags and positive/negative rows are skipped."""
        text = (
            "abandon\tfear\t1\n"
            "abandon\tsadness\t1\n"
            "abandon\tjoy\t0\n"
            "abandon\tnegative\t1\n"
            "happy\tjoy\n"
            "happy\tpositive\n"
        )
        lex = lexicon(text, LexiconKind.EMOTION)
        assert dict(lex.emotion) == {
            "abandon": frozenset({"fear", "sadness"}),
            "happy": frozenset({"joy"}),
        }

    @pytest.mark.parametrize("line", ["calm\tserenity", "calm\tjoy\t2", "calm"])
    def test_bad_lines(self, line):
        """Unknown emotion, bad flag, missing emotion."""
        with pytest.raises(LexiconError):
            lexicon(line + "\n", LexiconKind.EMOTION)


class TestDeception:
    """One term per line."""

    def test_terms(self):
        """Comments ignored."""
        lex = lexicon("# curated\nHonestly\nto be frank\n", LexiconKind.DECEPTION)
        assert lex.terms == frozenset({"honestly", "to be frank"})

    def test_bundled_list_is_empty(self, lexicons):
        """Ships without terms."""
        assert len(lexicons.deception) == 0
        assert len(lexicons.valence) > 0
        assert len(lexicons.emotion) > 0


class TestFiles:
    """Path-based loading."""

    def test_error_names_the_file(self, tmp_path):
        """File path prefixes the message."""
        path = tmp_path / "bad.tsv"
        path.write_text("word\tnope\n", encoding="utf-8")
        with pytest.raises(LexiconError, match="bad.tsv"):
            LexiconRepository.open_lexicon(path, LexiconKind.VALENCE)

    def test_custom_stopwords(self, tmp_path):
        """One word per line; None keeps the built-in list."""
        path = tmp_path / "stop.txt"
        path.write_text("Foo\nbar\n", encoding="utf-8")
        assert LexiconRepository.open_stopwords(path) == frozenset({"foo", "bar"})
        assert LexiconRepository.open_stopwords(None) is None


class TestDlFormats:
    """state,pattern CSV."""

    def test_bundled_table(self):
        """Ten states, California among them."""
        table = LexiconRepository.open_dl_formats(None)
        assert len(table.entries) == 10
        assert ("CA", "A9999999") in table.entries

    @pytest.mark.parametrize(
        "text",
        [
            "state,format\nCA,A9999999\n",
            "state,pattern\nCA,A9999999\nca,99999999\n",
            "state,pattern\nCA,\n",
        ],
    )
    def test_bad_tables(self, text):
        """Missing column, duplicate state, empty pattern."""
        with pytest.raises(LexiconError):
            LexiconRepository.load_dl_formats(io.StringIO(text))
