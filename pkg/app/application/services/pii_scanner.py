"""Personally identifiable information detection, validation, reporting and redaction."""

import logging
import re
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import lru_cache, partial
from typing import Any

from app.application.services.corpus_index import Corpus, EmailDoc
from app.resources.scan_executor import ScanExecutor

logger = logging.getLogger(__name__)


class PiiError(Exception):
    """Raised when a detector configuration is invalid."""

    pass


class PiiCategory(str, Enum):
    """Detector categories; the first eight make up the standard report."""

    SSN = "ssn"
    CREDIT_CARD = "credit_card"
    PASSWORD_IN_URL = "password_in_url"
    PASSPORT = "passport"
    DRIVERS_LICENSE = "drivers_license"
    IBAN = "iban"
    DATE = "date"
    PHONE = "phone"
    EMAIL = "email"
    IP_ADDRESS = "ip_address"


REPORTED_CATEGORIES = tuple(PiiCategory)[:8]
CONTACT_CATEGORIES = (PiiCategory.EMAIL, PiiCategory.IP_ADDRESS)
KEEP_LAST_FOUR = frozenset({PiiCategory.SSN, PiiCategory.CREDIT_CARD})
REPORT_ORDER = {c: i for i, c in enumerate(PiiCategory)}

# Country -> total IBAN length
IBAN_LENGTHS = {
    "AD": 24, "AE": 23, "AT": 20, "BE": 16, "BG": 22, "BH": 22, "BR": 29, "CH": 21,
    "CY": 28, "CZ": 24, "DE": 22, "DK": 18, "EE": 20, "ES": 24, "FI": 18, "FO": 18,
    "FR": 27, "GB": 22, "GI": 23, "GL": 18, "GR": 27, "HR": 21, "HU": 28, "IE": 22,
    "IL": 23, "IS": 26, "IT": 27, "JO": 30, "KW": 30, "KZ": 20, "LB": 28, "LI": 21,
    "LT": 20, "LU": 20, "LV": 21, "MC": 27, "MT": 31, "NL": 18, "NO": 15, "PL": 28,
    "PT": 25, "QA": 29, "RO": 24, "SA": 24, "SE": 24, "SI": 19, "SK": 24, "SM": 27,
    "TR": 26,
}  # fmt: skip

_B = r"(?<![A-Za-z0-9])"  # no alphanumeric before
_E = r"(?![A-Za-z0-9])"  # no alphanumeric after

_SSN_GROUPED = re.compile(_B + r"(?<!-)(\d{3})([- ])(\d{2})\2(\d{4})(?!-)" + _E)
_SSN_BARE = re.compile(_B + r"(\d{3})(\d{2})(\d{4})" + _E)
_CARD = re.compile(_B + r"(?<!-)\d(?:[ -]?\d){12,15}" + _E)
_URL = re.compile(r"https?://[^\s<>\"']+", re.IGNORECASE)
_URL_PASSWORD = re.compile(r"[?&;](?:password|passwd|pwd)=([^&#;\s]+)", re.IGNORECASE)
_PASSPORT = re.compile(_B + r"(?=[A-Za-z0-9]{0,8}\d)[A-Za-z0-9]{9}" + _E)
_PASSPORT_KEYWORD = re.compile(r"passport", re.IGNORECASE)
_DL_KEYWORD = re.compile(r"\b(?:licen[cs]e\w*|dl)\b", re.IGNORECASE)
_IBAN_COMPACT = re.compile(_B + r"[A-Z]{2}\d{2}[A-Z0-9]{11,30}" + _E)
_IBAN_GROUPED = re.compile(_B + r"[A-Z]{2}\d{2}(?: [A-Z0-9]{4}){2,7}(?: [A-Z0-9]{1,3})?" + _E)
_IBAN_SHAPE = re.compile(r"^[A-Z]{2}\d{2}[A-Z0-9]{11,30}$")

_MONTH = (
    r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|june?|july?|aug(?:ust)?"
    r"|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)"
)
_DATES = (
    re.compile(
        r"(?<![\d/])(?:0?[1-9]|1[0-2])/(?:0?[1-9]|[12]\d|3[01])/(?:\d{4}|\d{2})(?![\d/])"
    ),
    re.compile(r"(?<![\d/])(?:0?[1-9]|1[0-2])/\d{2}(?![\d/])"),
    re.compile(r"(?<![\d-])(?:19|20)\d{2}-(?:0?[1-9]|1[0-2])-(?:0?[1-9]|[12]\d|3[01])(?![\d-])"),
    re.compile(
        r"\b" + _MONTH + r"\.?\s+\d{1,2}(?:st|nd|rd|th)?,?\s+\d{4}\b", re.IGNORECASE
    ),
    re.compile(r"\b\d{1,2}(?:st|nd|rd|th)?\s+" + _MONTH + r"\.?,?\s+\d{4}\b", re.IGNORECASE),
)
_PHONE = re.compile(
    r"(?<!\d)(?:\+?1[-.\s]?)?(?:\(\d{3}\)\s?|\d{3}[-.\s])\d{3}[-.\s]\d{4}(?!\d)"
)
_EMAIL = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}")
_IP = re.compile(
    r"(?<![\d.])(?:(?:25[0-5]|2[0-4]\d|1?\d?\d)\.){3}(?:25[0-5]|2[0-4]\d|1?\d?\d)(?![\d.])"
)


def luhn_valid(digits: str) -> bool:
    """Mod-10 check over a 13-19 digit string; anything else is False."""
    if not (13 <= len(digits) <= 19) or not digits.isdigit():
        return False
    total = 0
    for i, ch in enumerate(reversed(digits)):
        d = int(ch)
        if i % 2 == 1:
            d = d * 2 - 9 if d > 4 else d * 2
        total += d
    return total % 10 == 0


def iban_valid(s: str) -> bool:
    """Shape, per-country length and rearranged mod-97 == 1; spaces are ignored."""
    compact = s.replace(" ", "")
    if not _IBAN_SHAPE.match(compact):
        return False
    if IBAN_LENGTHS.get(compact[:2]) != len(compact):
        return False
    rearranged = compact[4:] + compact[:4]
    return int("".join(str(int(ch, 36)) for ch in rearranged)) % 97 == 1


def ssn_structure_valid(area: str, group: str, serial: str) -> bool:
    """Area not 000/666/9xx, group not 00, serial not 0000."""
    return (
        area != "000" and area != "666" and not area.startswith("9")
        and group != "00" and serial != "0000"
    )


def card_issuer_match(digits: str) -> bool:
    """Visa 4, MasterCard 51-55, AMEX 34/37 at 13-16 digits."""
    if not 13 <= len(digits) <= 16:
        return False
    return digits[0] == "4" or "51" <= digits[:2] <= "55" or digits[:2] in ("34", "37")


@dataclass(frozen=True)
class DlFormatTable:
    """Driver's-license formats per state: A = letter, 9 = digit, anything else literal."""

    entries: tuple[tuple[str, str], ...]

    def __post_init__(self):
        states = [s for s, _ in self.entries]
        if len(set(states)) != len(states):
            raise PiiError("Driver's license table has duplicate state codes")
        if any(not p for _, p in self.entries):
            raise PiiError("Driver's license table has an empty pattern")

    def compile(self) -> tuple[re.Pattern, ...]:
        def to_regex(pattern: str) -> str:
            return "".join(
                "[A-Za-z]" if ch == "A" else r"\d" if ch == "9" else re.escape(ch)
                for ch in pattern
            )

        return tuple(re.compile(_B + to_regex(p) + _E) for _, p in self.entries)


@dataclass(frozen=True)
class PiiFinding:
    """One detected item."""

    category: PiiCategory
    start: int
    end: int
    matched: str
    validated: bool
    context: str
    doc_id: str = ""
    # Same window with every finding of the document masked
    masked_context: str | None = None

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def to_dict(self, echo: bool = True) -> dict[str, Any]:
        record: dict[str, Any] = {
            "doc_id": self.doc_id,
            "category": self.category.value,
            "span": [self.start, self.end],
            "validated": self.validated,
        }
        if echo:
            record["matched"] = self.matched
            record["context"] = self.context
        else:
            shape = mask(self.matched, self.category in KEEP_LAST_FOUR)
            record["shape"] = shape
            if self.masked_context is not None:
                record["context"] = self.masked_context
            else:
                record["context"] = self.context.replace(self.matched, shape)
        return record


@dataclass(frozen=True)
class PiiConfig:
    """Enabled detectors and their parameters."""

    categories: tuple[PiiCategory, ...] = REPORTED_CATEGORIES
    dl_formats: DlFormatTable = field(default_factory=lambda: DlFormatTable(()))
    keyword_window: int = 40
    context_width: int = 80

    @classmethod
    def build(
        cls,
        dl_formats: DlFormatTable,
        include_contact: bool = False,
        keyword_window: int = 40,
        context_width: int = 80,
    ) -> "PiiConfig":
        categories = REPORTED_CATEGORIES + (CONTACT_CATEGORIES if include_contact else ())
        return cls(categories, dl_formats, keyword_window, context_width)


class PiiScanner:
    """Applies a PiiConfig to text."""

    def __init__(self, config: PiiConfig):
        """Initialize scanner.

        Args:
            config: Detector set
        """
        self.config = config
        self._dl_patterns = config.dl_formats.compile()
        self._detectors = {
            PiiCategory.SSN: self._ssn,
            PiiCategory.CREDIT_CARD: self._credit_card,
            PiiCategory.PASSWORD_IN_URL: self._password_in_url,
            PiiCategory.PASSPORT: self._passport,
            PiiCategory.DRIVERS_LICENSE: self._drivers_license,
            PiiCategory.IBAN: self._iban,
            PiiCategory.DATE: partial(self._patterns, _DATES),
            PiiCategory.PHONE: partial(self._patterns, (_PHONE,)),
            PiiCategory.EMAIL: partial(self._patterns, (_EMAIL,)),
            PiiCategory.IP_ADDRESS: partial(self._patterns, (_IP,)),
        }

    def scan(self, text: str, doc_id: str = "") -> list[PiiFinding]:
        """Findings of every enabled category, sorted by span start."""
        findings: list[PiiFinding] = []
        for category in self.config.categories:
            candidates = self._detectors[category](text)
            for start, end, validated in _leftmost_longest(candidates):
                findings.append(
                    PiiFinding(
                        category=category,
                        start=start,
                        end=end,
                        matched=text[start:end],
                        validated=validated,
                        context=self._context(text, start, end),
                        doc_id=doc_id,
                    )
                )
        findings.sort(key=lambda f: (f.start, f.end, REPORT_ORDER[f.category]))
        if not findings:
            return findings
        # Mask redaction keeps offsets, so the windows line up with the raw ones
        redacted = redact(text, findings)
        return [
            replace(f, masked_context=self._context(redacted, f.start, f.end)) for f in findings
        ]

    def _context(self, text: str, start: int, end: int) -> str:
        width = self.config.context_width
        pad = max(0, (width - (end - start)) // 2)
        window = text[max(0, start - pad) : end + pad][:width]
        return " ".join(window.split())

    def _near_keyword(self, text: str, keyword: re.Pattern, start: int, end: int) -> bool:
        w = self.config.keyword_window
        return any(m.end() >= start - w and m.start() <= end + w for m in keyword.finditer(text))

    def _ssn(self, text: str) -> list[tuple[int, int, bool]]:
        found = []
        for m in _SSN_GROUPED.finditer(text):
            if ssn_structure_valid(m.group(1), m.group(3), m.group(4)):
                found.append((m.start(), m.end(), True))
        for m in _SSN_BARE.finditer(text):
            if ssn_structure_valid(m.group(1), m.group(2), m.group(3)):
                found.append((m.start(), m.end(), False))
        return found

    def _credit_card(self, text: str) -> list[tuple[int, int, bool]]:
        found = []
        for m in _CARD.finditer(text):
            digits = re.sub(r"[ -]", "", m.group())
            if card_issuer_match(digits):
                found.append((m.start(), m.end(), luhn_valid(digits)))
        return found

    def _password_in_url(self, text: str) -> list[tuple[int, int, bool]]:
        found = []
        for url in _URL.finditer(text):
            for m in _URL_PASSWORD.finditer(url.group()):
                found.append((url.start() + m.start(1), url.start() + m.end(1), False))
        return found

    def _passport(self, text: str) -> list[tuple[int, int, bool]]:
        return [
            (m.start(), m.end(), False)
            for m in _PASSPORT.finditer(text)
            if self._near_keyword(text, _PASSPORT_KEYWORD, m.start(), m.end())
        ]

    def _drivers_license(self, text: str) -> list[tuple[int, int, bool]]:
        return [
            (m.start(), m.end(), False)
            for pattern in self._dl_patterns
            for m in pattern.finditer(text)
            if self._near_keyword(text, _DL_KEYWORD, m.start(), m.end())
        ]

    def _iban(self, text: str) -> list[tuple[int, int, bool]]:
        found = []
        for pattern in (_IBAN_COMPACT, _IBAN_GROUPED):
            for m in pattern.finditer(text):
                compact = m.group().replace(" ", "")
                if IBAN_LENGTHS.get(compact[:2]) == len(compact):
                    found.append((m.start(), m.end(), iban_valid(compact)))
        return found

    @staticmethod
    def _patterns(patterns: Sequence[re.Pattern], text: str) -> list[tuple[int, int, bool]]:
        return [(m.start(), m.end(), False) for p in patterns for m in p.finditer(text)]


def _leftmost_longest(candidates: list[tuple[int, int, bool]]) -> list[tuple[int, int, bool]]:
    """Drop candidates overlapping an earlier-starting or longer kept one."""
    kept: list[tuple[int, int, bool]] = []
    last_end = -1
    for start, end, validated in sorted(candidates, key=lambda c: (c[0], -(c[1] - c[0]), not c[2])):
        if start >= last_end:
            kept.append((start, end, validated))
            last_end = end
    return kept


@lru_cache(maxsize=8)
def scanner_for(config: PiiConfig) -> PiiScanner:
    return PiiScanner(config)


def scan_document(text: str, config: PiiConfig, doc_id: str = "") -> list[PiiFinding]:
    """Scan one text with the given detector set."""
    return scanner_for(config).scan(text, doc_id)


@dataclass
class PiiReport:
    """Per-category counts, optionally with the findings behind them."""

    counts: dict[PiiCategory, int] = field(default_factory=dict)
    findings: list[PiiFinding] | None = None

    @classmethod
    def empty(cls, config: PiiConfig, keep_findings: bool = False) -> "PiiReport":
        return cls(counts={c: 0 for c in config.categories}, findings=[] if keep_findings else None)

    @property
    def grand_total(self) -> int:
        return sum(self.counts.values())

    @property
    def percentages(self) -> dict[PiiCategory, float]:
        """Share of the grand total per category (all 0 when nothing was found)."""
        total = self.grand_total
        return {c: (n / total if total else 0.0) for c, n in self.counts.items()}

    def add(self, findings: Sequence[PiiFinding]) -> None:
        for f in findings:
            self.counts[f.category] = self.counts.get(f.category, 0) + 1
        if self.findings is not None:
            self.findings.extend(findings)

    def merge(self, other: "PiiReport") -> "PiiReport":
        """Combine two reports; findings keep left-then-right order."""
        counts = dict(self.counts)
        for c, n in other.counts.items():
            counts[c] = counts.get(c, 0) + n
        findings = None
        if self.findings is not None or other.findings is not None:
            findings = [*(self.findings or []), *(other.findings or [])]
        return PiiReport(counts=counts, findings=findings)

    def to_dict(self) -> dict[str, Any]:
        ordered = sorted(self.counts, key=REPORT_ORDER.__getitem__)
        percentages = self.percentages
        return {
            "counts": {c.value: self.counts[c] for c in ordered},
            "percentages": {c.value: percentages[c] for c in ordered},
            "grand_total": self.grand_total,
        }


def _scan_shard(config: PiiConfig, keep_findings: bool, docs: Sequence[EmailDoc]) -> PiiReport:
    report = PiiReport.empty(config, keep_findings)
    for doc in docs:
        report.add(scan_document(doc.text, config, doc.id))
    return report


def scan_corpus(
    corpus: Corpus,
    config: PiiConfig,
    executor: ScanExecutor | None = None,
    keep_findings: bool = False,
) -> PiiReport:
    """Aggregate findings over subject and body of every document.

    Args:
        corpus: Documents to scan
        config: Detector set
        executor: Shard executor (defaults to settings-driven parallelism)
        keep_findings: Retain every finding in document order

    Returns:
        PiiReport; identical for any executor worker count
    """
    executor = executor or ScanExecutor()
    report = executor.run(
        corpus.docs,
        partial(_scan_shard, config, keep_findings),
        PiiReport.merge,
        PiiReport.empty(config, keep_findings),
    )
    logger.info(f"PII scan of {len(corpus)} documents: {report.grand_total} findings")
    return report


class RedactStyle(str, Enum):
    MASK = "mask"
    LABEL = "label"


def mask(matched: str, keep_last_four: bool) -> str:
    """Replace letters and digits with X, optionally sparing the last four; separators stay."""
    alnum_positions = [i for i, ch in enumerate(matched) if ch.isalnum()]
    spared = set(alnum_positions[-4:]) if keep_last_four else set()
    return "".join(
        "X" if ch.isalnum() and i not in spared else ch for i, ch in enumerate(matched)
    )


def redact(
    text: str, findings: Sequence[PiiFinding], style: RedactStyle = RedactStyle.MASK
) -> str:
    """Replace finding spans in text.

    Overlapping spans are merged first; a merged span takes the category of its
    earliest finding and keeps its last four characters if any part is an SSN or card.
    Mask style preserves length; label style writes "[CATEGORY]" per merged span.
    """
    merged: list[tuple[int, int, PiiCategory, bool]] = []
    for f in sorted(findings, key=lambda f: (f.start, -f.end)):
        keep = f.category in KEEP_LAST_FOUR
        if merged and f.start < merged[-1][1]:
            start, end, category, kept = merged[-1]
            merged[-1] = (start, max(end, f.end), category, kept or keep)
        else:
            merged.append((f.start, f.end, f.category, keep))

    out: list[str] = []
    cursor = 0
    for start, end, category, keep in merged:
        out.append(text[cursor:start])
        if style is RedactStyle.LABEL:
            out.append(f"[{category.value.upper()}]")
        else:
            out.append(mask(text[start:end], keep))
        cursor = end
    out.append(text[cursor:])
    return "".join(out)
