"""First-significant-digit analysis against Benford's law."""

import math
from collections.abc import Iterable
from dataclasses import dataclass
from enum import Enum
from typing import Any

import numpy as np
from scipy.stats import chisquare

DIGITS = tuple(range(1, 10))


class Verdict(str, Enum):
    """Conformity band by mean absolute deviation."""

    CLOSE = "close"
    ACCEPTABLE = "acceptable"
    MARGINAL = "marginal"
    NONCONFORMING = "nonconforming"
    INSUFFICIENT = "insufficient"


@dataclass
class DigitDistribution:
    """Leading-digit counts for digits 1-9."""

    counts: list[int]

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def freq(self) -> list[float]:
        n = self.n
        return [c / n if n else 0.0 for c in self.counts]


@dataclass
class ConformityReport:
    distribution: DigitDistribution
    chi_square: float | None
    mad: float | None
    verdict: Verdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.distribution.n,
            "counts": self.distribution.counts,
            "freq": self.distribution.freq,
            "expected": BenfordAnalyzer.expected(),
            "chi_square": self.chi_square,
            "mad": self.mad,
            "verdict": self.verdict.value,
        }


class BenfordAnalyzer:
    """Benford first-digit conformity checks."""

    MIN_VALUES = 100

    # Upper MAD bounds per verdict
    MAD_CLOSE = 0.006
    MAD_ACCEPTABLE = 0.012
    MAD_MARGINAL = 0.015

    @classmethod
    def first_digit(cls, x: float) -> int | None:
        """Leading significant digit; None for x <= 0 or non-finite x."""
        if not math.isfinite(x) or x <= 0:
            return None
        # 15 significant digits, so x and x * 10**k share a leading digit
        return int(f"{x:.14e}"[0])

    @classmethod
    def expected(cls) -> list[float]:
        """p(d) = log10(1 + 1/d) for d = 1..9."""
        return [math.log10(1 + 1 / d) for d in DIGITS]

    @classmethod
    def distribution(cls, values: Iterable[float]) -> DigitDistribution:
        counts = [0] * 9
        for v in values:
            d = cls.first_digit(float(v))
            if d is not None:
                counts[d - 1] += 1
        return DigitDistribution(counts=counts)

    @classmethod
    def verdict_for(cls, mad: float) -> Verdict:
        if mad <= cls.MAD_CLOSE:
            return Verdict.CLOSE
        if mad <= cls.MAD_ACCEPTABLE:
            return Verdict.ACCEPTABLE
        if mad <= cls.MAD_MARGINAL:
            return Verdict.MARGINAL
        return Verdict.NONCONFORMING

    @classmethod
    def conformity(cls, values: Iterable[float]) -> ConformityReport:
        """Chi-square (8 df) and MAD of observed vs expected leading-digit shares.

        Fewer than MIN_VALUES positive finite values yield verdict "insufficient".
        """
        dist = cls.distribution(values)
        if dist.n < cls.MIN_VALUES:
            return ConformityReport(dist, None, None, Verdict.INSUFFICIENT)

        expected = np.asarray(cls.expected())
        observed = np.asarray(dist.counts, dtype=float)
        chi2 = chisquare(observed, f_exp=expected * dist.n).statistic
        mad = float(np.mean(np.abs(np.asarray(dist.freq) - expected)))
        return ConformityReport(dist, float(chi2), mad, cls.verdict_for(mad))


def first_digit(x: float) -> int | None:
    return BenfordAnalyzer.first_digit(x)


def benford_expected() -> list[float]:
    return BenfordAnalyzer.expected()


def conformity(values: Iterable[float]) -> ConformityReport:
    return BenfordAnalyzer.conformity(values)
