"""Command-line surface: subcommands, reports and exit codes."""

import json
from pathlib import Path

import pytest

from app.cli import main
from app.tools.commands import EXIT_INPUT_ERROR, EXIT_OK
from conftest import BASE_DATE, write_corpus_csv


def run(capsys, *argv) -> tuple[int, dict | None]:
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def mail_rows(bodies: list[str]) -> list[dict]:
    return [
        {
            "id": f"m{i}",
            "date": BASE_DATE.isoformat(),
            "sender": f"user{i % 2}@enron.com",
            "recipients": "desk@enron.com",
            "subject": "",
            "body": body,
        }
        for i, body in enumerate(bodies)
    ]


@pytest.fixture
def financials_csv(tmp_path: Path) -> Path:
    path = tmp_path / "financials.csv"
    path.write_text(
        "person,poi,salary,bonus\n"
        "alpha,1,200000,2000000\n"
        "bravo,0,150000,100\n"
        "charlie,0,180000,1500000\n"
        "delta,1,90000,0\n",
        encoding="utf-8",
    )
    return path


class TestIngest:
    """ingest."""

    def test_report(self, capsys, labeled_corpus_csv, tmp_path):
        """Counts on stdout, documents exported."""
        export = tmp_path / "docs.jsonl"
        code, payload = run(capsys, "ingest", "--corpus", labeled_corpus_csv, "--export", export)
        assert code == EXIT_OK
        assert payload["parse_report"]["rows_read"] == 200
        assert payload["stats"]["doc_count"] == 200
        assert len(export.read_text(encoding="utf-8").splitlines()) == 200

    def test_missing_file(self, capsys, tmp_path):
        """Input errors exit with 2 and print nothing."""
        code, payload = run(capsys, "ingest", "--corpus", tmp_path / "absent.csv")
        assert code == EXIT_INPUT_ERROR
        assert payload is None

    def test_report_to_file(self, capsys, labeled_corpus_csv, tmp_path):
        """--out replaces stdout."""
        out = tmp_path / "reports" / "ingest.json"
        code, payload = run(capsys, "ingest", "--corpus", labeled_corpus_csv, "--out", out)
        assert (code, payload) == (EXIT_OK, None)
        assert json.loads(out.read_text(encoding="utf-8"))["stats"]["doc_count"] == 200

    def test_usage_error(self, capsys):
        """argparse rejects unknown subcommands with exit status 2."""
        with pytest.raises(SystemExit) as exc:
            main(["shred"])
        assert exc.value.code == 2


class TestPii:
    """pii."""

    @pytest.fixture
    def pii_csv(self, tmp_path) -> Path:
        bodies = [
            "ssn 123-45-6789",
            "call (713) 853-6161",
            "card 4111 1111 1111 1111",
            "nothing here",
        ] * 10
        return write_corpus_csv(tmp_path / "pii.csv", mail_rows(bodies))

    def test_counts(self, capsys, pii_csv):
        """Ten of each planted item."""
        code, payload = run(capsys, "pii", "--corpus", pii_csv)
        assert code == EXIT_OK
        assert payload["counts"]["ssn"] == 10
        assert payload["counts"]["phone"] == 10
        assert payload["counts"]["credit_card"] == 10
        assert payload["grand_total"] == 30
        assert payload["documents"] == 40

    def test_jobs_do_not_change_output(self, capsys, pii_csv):
        """One worker or eight, same report."""
        _, serial = run(capsys, "pii", "--corpus", pii_csv, "--jobs", "1")
        _, parallel = run(capsys, "pii", "--corpus", pii_csv, "--jobs", "8")
        assert serial == parallel

    def test_findings_without_echo(self, capsys, pii_csv, tmp_path):
        """Exported findings carry shapes, not values."""
        findings = tmp_path / "findings.jsonl"
        code, _ = run(
            capsys, "pii", "--corpus", pii_csv, "--findings-out", findings, "--no-echo"
        )
        assert code == EXIT_OK
        records = [json.loads(line) for line in findings.read_text(encoding="utf-8").splitlines()]
        assert len(records) == 30
        assert all("matched" not in r for r in records)
        assert "XXX-XX-6789" in {r["shape"] for r in records}


class TestClassifyAndRules:
    """classify, train and rules."""

    def test_builtin_responsive_rules(self, capsys, tmp_path):
        """Two mentions of California make a document responsive."""
        corpus = write_corpus_csv(
            tmp_path / "three.csv",
            mail_rows(
                [
                    "California and california power markets",
                    "Lunch on Friday",
                    "Golf this weekend",
                ]
            ),
        )
        labels = tmp_path / "labels.jsonl"
        code, payload = run(
            capsys,
            "classify",
            "--corpus",
            corpus,
            "--ruleset",
            "fig4_responsive",
            "--labels-out",
            labels,
        )
        assert code == EXIT_OK
        assert payload["positive"] == 1
        assert payload["counts"] == {"non-responsive": 2, "responsive": 1}
        first = json.loads(labels.read_text(encoding="utf-8").splitlines()[0])
        assert (first["doc_id"], first["label"], first["rule"]) == ("m0", 1, 4)

    def test_two_classifier_sources(self, capsys, labeled_corpus_csv, tmp_path):
        """--model and --ruleset are mutually exclusive."""
        with pytest.raises(SystemExit) as exc:
            main(
                [
                    "classify",
                    "--corpus",
                    str(labeled_corpus_csv),
                    "--ruleset",
                    "fig4_responsive",
                    "--model",
                    str(tmp_path / "m.json"),
                ]
            )
        assert exc.value.code == 2

    def test_train_is_reproducible(self, capsys, labeled_corpus_csv, tmp_path):
        """Same seed, byte-identical model files."""
        paths = [tmp_path / "one.json", tmp_path / "two.json"]
        for path in paths:
            code, payload = run(
                capsys,
                "train",
                "--corpus",
                labeled_corpus_csv,
                "--sampler",
                "under",
                "--model-out",
                path,
                "--seed",
                "7",
            )
            assert code == EXIT_OK
            assert payload["target"] == "responsive"
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_trained_model_renders_and_classifies(self, capsys, labeled_corpus_csv, tmp_path):
        """A CART model file feeds both rules and classify."""
        model = tmp_path / "cart.json"
        argv = ["train", "--corpus", labeled_corpus_csv, "--sampler", "under"]
        code, _ = run(capsys, *argv, "--model-out", model)
        assert code == EXIT_OK

        code, rules = run(capsys, "rules", "--model", model, "--corpus", labeled_corpus_csv)
        assert code == EXIT_OK
        assert rules["text"].startswith("Rule 1: when ")
        assert sum(c["hits"] for c in rules["coverage"]) == 200

        code, classified = run(capsys, "classify", "--corpus", labeled_corpus_csv, "--model", model)
        assert code == EXIT_OK
        assert classified["documents"] == 200
        assert classified["metrics"]["accuracy"] >= 0.95

    def test_rules_for_builtin_set(self, capsys):
        """No corpus needed to render."""
        code, payload = run(capsys, "rules", "--ruleset", "bonus_single_split")
        assert code == EXIT_OK
        assert payload["text"].splitlines()[0] == (
            "Rule 1: when bonus >= $1,170,000 then person of interest (1)"
        )


class TestPoi:
    """poi."""

    def test_bonus_rule_on_financials(self, capsys, financials_csv):
        """One hit, one false alarm, one miss and one correct rejection."""
        code, payload = run(
            capsys,
            "poi",
            "--financials",
            financials_csv,
            "--join-mode",
            "financial_only",
            "--ruleset",
            "bonus_single_split",
        )
        assert code == EXIT_OK
        assert payload["persons"] == 4
        assert payload["poi"] == 2
        assert payload["metrics"]["matrix"] == {"tp": 1, "fp": 1, "fn": 1, "tn": 1}

    def test_missing_financials(self, capsys):
        """The financial table is required."""
        code, _ = run(capsys, "poi", "--ruleset", "bonus_single_split")
        assert code == EXIT_INPUT_ERROR


class TestSentiment:
    """sentiment."""

    def test_report_sections(self, capsys, tmp_path):
        """Radar, monthly timeline, per-sender profiles."""
        corpus = write_corpus_csv(
            tmp_path / "moods.csv",
            mail_rows(["fraud and anger", "happy team", "crisis and loss", "excellent plan"]),
        )
        code, payload = run(capsys, "sentiment", "--corpus", corpus)
        assert code == EXIT_OK
        assert sum(payload["radar"].values()) == pytest.approx(1.0)
        assert [p["period"] for p in payload["timeline"]] == ["2001-01"]
        assert len(payload["profiles"]) == 2


class TestBenford:
    """benford."""

    def test_too_few_values(self, capsys, tmp_path):
        """Fifty values are not enough for a verdict."""
        values = tmp_path / "values.txt"
        values.write_text("\n".join(str(v) for v in range(1, 51)) + "\n", encoding="utf-8")
        code, payload = run(capsys, "benford", "--series", "file", "--values-file", values)
        assert code == EXIT_OK
        assert payload["verdict"] == "insufficient"
        assert payload["n"] == 50

    def test_file_series_needs_values(self, capsys):
        """Missing input is an input error."""
        code, _ = run(capsys, "benford", "--series", "file")
        assert code == EXIT_INPUT_ERROR

    def test_body_lengths(self, capsys, labeled_corpus_csv):
        """Corpus-derived series."""
        code, payload = run(capsys, "benford", "--corpus", labeled_corpus_csv)
        assert code == EXIT_OK
        assert payload["series"] == "body_length"
        assert payload["n"] == 200

