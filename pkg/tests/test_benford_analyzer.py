"""Leading-digit conformity."""

import math

import numpy as np
import pytest

from app.application.services.benford_analyzer import (
    BenfordAnalyzer,
    Verdict,
    benford_expected,
    conformity,
    first_digit,
)


class TestFirstDigit:
    """Leading significant digit."""

    @pytest.mark.parametrize(
        "x,digit",
        [
            (1, 1),
            (9.99, 9),
            (0.0042, 4),
            (123456789, 1),
            (1e-300, 1),
            (0, None),
            (-5, None),
            (math.inf, None),
            (math.nan, None),
        ],
    )
    def test_cases(self, x, digit):
        """Positive finite values only."""
        assert first_digit(x) == digit


class TestExpected:
    """log10(1 + 1/d)."""

    def test_probabilities(self):
        """Sums to one, digit 1 about 30.1%."""
        expected = benford_expected()
        assert expected[0] == pytest.approx(0.30103, abs=1e-5)
        assert expected[8] == pytest.approx(0.04576, abs=1e-5)
        assert sum(expected) == pytest.approx(1.0)

    def test_matches_log_uniform_grid(self):
        """Leading digits of a million evenly spaced log-values follow the law."""
        n = 1_000_000
        grid = 10 ** ((np.arange(n) + 0.5) * 6 / n)
        freq = conformity(grid).distribution.freq
        assert freq == pytest.approx(benford_expected(), abs=1e-3)


class TestScaleInvariance:
    """Multiplying by a constant."""

    @pytest.fixture(scope="class")
    def values(self) -> np.ndarray:
        log_uniform = 10 ** np.random.default_rng(5).uniform(0, 6, size=10_000)
        return np.concatenate(
            [log_uniform, np.arange(1, 10_001, dtype=float), [0.3, 0.7, 0.29, 0.57]]
        )

    @pytest.mark.parametrize("k", range(-8, 9))
    def test_power_of_ten_is_exact(self, values, k):
        """Same counts, same statistics."""
        assert conformity(values * 10.0**k) == conformity(values)

    @pytest.mark.parametrize("x", [0.7, 0.57, 0.29, 0.3])
    def test_decimal_fractions_keep_their_digit(self, x):
        """Products such as 0.7 * 1e-7 land just below the exact value."""
        digit = first_digit(x)
        assert all(first_digit(x * 10.0**k) == digit for k in range(-8, 9))

    def test_arbitrary_factor_keeps_mad(self):
        """Log-uniform data stays Benford under any positive factor."""
        values = 10 ** np.random.default_rng(6).uniform(0, 6, size=100_000)
        assert conformity(values * 3.7).mad == pytest.approx(conformity(values).mad, abs=0.005)


class TestConformity:
    """Chi-square, MAD and verdicts."""

    def test_log_uniform_sample_is_close(self):
        """10,000 draws of 10^U(0, 6)."""
        values = 10 ** np.random.default_rng(1).uniform(0, 6, size=10_000)
        report = conformity(values)
        assert report.verdict is Verdict.CLOSE
        assert report.distribution.n == 10_000
        assert report.mad < BenfordAnalyzer.MAD_CLOSE

    def test_uniform_digits_nonconforming(self):
        """Sixty values per leading digit."""
        values = [d * 100 + i for d in range(1, 10) for i in range(60)]
        report = conformity(values)
        assert report.distribution.counts == [60] * 9
        assert report.verdict is Verdict.NONCONFORMING
        assert report.chi_square > 100

    def test_too_few_values(self):
        """Fewer than 100 usable values."""
        report = conformity(range(1, 51))
        assert report.verdict is Verdict.INSUFFICIENT
        assert report.chi_square is None
        assert report.mad is None

    def test_unusable_values_not_counted(self):
        """Zeros and negatives do not reach the minimum."""
        report = conformity([0] * 80 + [-3] * 80 + list(range(1, 60)))
        assert report.distribution.n == 59
        assert report.verdict is Verdict.INSUFFICIENT

    def test_exact_expected_counts(self):
        """Counts matching the law give a near-zero MAD."""
        values = []
        for d, p in enumerate(benford_expected(), start=1):
            values += [d] * round(p * 1000)
        report = conformity(values)
        assert report.mad < 0.001
        assert report.verdict is Verdict.CLOSE

    @pytest.mark.parametrize(
        "mad,verdict",
        [
            (0.006, Verdict.CLOSE),
            (0.0061, Verdict.ACCEPTABLE),
            (0.012, Verdict.ACCEPTABLE),
            (0.015, Verdict.MARGINAL),
            (0.0151, Verdict.NONCONFORMING),
        ],
    )
    def test_verdict_bands(self, mad, verdict):
        """Upper bounds are inclusive."""
        assert BenfordAnalyzer.verdict_for(mad) is verdict

    def test_report_dict(self):
        """Expected shares travel with the report."""
        data = conformity(range(1, 51)).to_dict()
        assert data["verdict"] == "insufficient"
        assert data["n"] == 50
        assert len(data["expected"]) == 9
