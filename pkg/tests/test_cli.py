"""
Tests for the command-line front end, run in-process through main.main
"""
import csv
import json

import pytest

import main
from conftest import binomial_stderr, within_stderr


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


class TestLookupTable:
    def test_d3_mub(self, tmp_path):
        out = tmp_path / "table.json"
        assert main.main(["lookup-table", "--d", "3", "--n", "3", "--kind", "mub", "--out", str(out)]) == 0
        table = json.loads(out.read_text(encoding="utf-8"))
        assert table["kind"] == "mub"
        assert len(table["rows"]) == 9

    def test_d2_mbb(self, tmp_path):
        out = tmp_path / "table.json"
        assert main.main(["lookup-table", "--d", "2", "--kind", "mbb", "--out", str(out)]) == 0
        assert len(json.loads(out.read_text(encoding="utf-8"))["rows"]) == 4

    def test_composite_mub_is_rejected(self, tmp_path, capsys):
        assert main.main(["lookup-table", "--d", "4", "--kind", "mub", "--out", str(tmp_path / "t.json")]) == 2
        assert "composite" in capsys.readouterr().err
        assert not (tmp_path / "t.json").exists()

    def test_wrong_format_is_rejected(self, tmp_path):
        assert main.main(["lookup-table", "--d", "3", "--format", "csv", "--out", str(tmp_path / "t.csv")]) == 2

    def test_unwritable_output(self, tmp_path):
        blocker = tmp_path / "file.txt"
        blocker.write_text("not a folder", encoding="utf-8")
        assert main.main(["lookup-table", "--d", "3", "--out", str(blocker / "table.json")]) == 3


class TestArguments:
    def test_unknown_kind(self):
        assert main.main(["lookup-table", "--d", "3", "--kind", "hadamard"]) == 2

    def test_missing_subcommand(self):
        assert main.main([]) == 2

    def test_missing_dimension(self):
        assert main.main(["verify", "--n", "3"]) == 2

    def test_bad_test_fraction(self, tmp_path):
        assert main.main(["simulate", "--d", "3", "--test-fraction", "1.5", "--out", str(tmp_path / "s")]) == 2

    def test_unknown_preset(self):
        assert main.main(["--preset", "nope"]) == 2

    def test_preset_expansion_keeps_extra_flags(self):
        argv = main.expand_preset(["--preset", "uniqueness", "--out", "x.json"])
        assert argv == ["verify", "--d", "3", "--n", "3", "--kind", "mub", "--out", "x.json"]


class TestBenchmark:
    def test_mbb_table_peaks_at_four(self, tmp_path):
        out = tmp_path / "mbb.csv"
        assert main.main(["benchmark-detection", "--kind", "mbb", "--d-range", "2..6", "--rounds", "300", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert list(rows[0]) == main.BENCHMARK_COLUMNS
        assert [int(row["d"]) for row in rows] == [2, 3, 4, 5, 6]
        best = max(rows, key=lambda row: float(row["analytic_rate"]))
        assert (best["d"], best["analytic_rate_num"], best["analytic_rate_den"]) == ("4", "15", "32")

    def test_mub_table_increases(self, tmp_path):
        out = tmp_path / "mub.csv"
        assert main.main(["benchmark-detection", "--kind", "mub", "--d-range", "3..13", "--rounds", "200", "--out", str(out)]) == 0
        rows = read_csv(out)
        assert [int(row["d"]) for row in rows] == [3, 5, 7, 11, 13]
        rates = [float(row["analytic_rate"]) for row in rows]
        assert all(a < b for a, b in zip(rates, rates[1:]))

    def test_same_seed_gives_identical_bytes(self, tmp_path):
        args = ["benchmark-detection", "--kind", "mbb", "--d-range", "3..4", "--rounds", "300", "--seed", "99"]
        assert main.main(args + ["--out", str(tmp_path / "a.csv")]) == 0
        assert main.main(args + ["--out", str(tmp_path / "b.csv")]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_range_without_valid_dimension(self, tmp_path):
        assert main.main(["benchmark-detection", "--kind", "mub", "--d-range", "8..10", "--out", str(tmp_path / "x.csv")]) == 2

    def test_reversed_range(self, tmp_path):
        assert main.main(["benchmark-detection", "--kind", "mbb", "--d-range", "6..2", "--out", str(tmp_path / "x.csv")]) == 2


class TestSimulate:
    def _run(self, tmp_path, *flags):
        base = tmp_path / "session"
        assert main.main(["simulate", "--out", str(base), *flags]) == 0
        lines = (tmp_path / "session.jsonl").read_text(encoding="utf-8").splitlines()
        summary = json.loads((tmp_path / "session.summary.json").read_text(encoding="utf-8"))
        return [json.loads(line) for line in lines], summary

    def test_honest_original(self, tmp_path):
        transcripts, summary = self._run(tmp_path, "--d", "3", "--rounds", "3000")
        assert len(transcripts) == 3000
        assert summary["detection_rate"] == 0.0
        assert summary["reconstruction_accuracy"] == 1.0
        assert within_stderr(summary["sifted_count"] / 3000, 1 / 3, binomial_stderr(1 / 3, 3000))
        for key in ("config", "sifted_count", "test_count", "detection_rate", "stderr", "key_length"):
            assert key in summary

    def test_honest_modified_has_no_announcements(self, tmp_path):
        transcripts, summary = self._run(tmp_path, "--d", "3", "--variant", "modified", "--rounds", "300")
        assert summary["sifted_count"] == 300
        assert all(t["announced"] == [] and t["valid"] for t in transcripts)

    def test_participant_attack_on_original(self, tmp_path):
        _, summary = self._run(tmp_path, "--d", "3", "--attack", "participant", "--variant", "original", "--rounds", "2000")
        assert summary["attack"]["recovery"] == 1.0
        assert summary["detection_rate"] == 0.0

    def test_participant_attack_on_modified(self, tmp_path):
        _, summary = self._run(tmp_path, "--d", "3", "--attack", "participant", "--variant", "modified", "--rounds", "3000")
        attack = summary["attack"]
        assert within_stderr(attack["recovery"], 1 / 3, attack["recovery_stderr"])
        assert summary["detection_rate"] > 0.5

    def test_intercept_attack_is_detected(self, tmp_path):
        transcripts, summary = self._run(tmp_path, "--d", "3", "--attack", "intercept", "--rounds", "3000")
        assert summary["detection_rate"] > 0.3
        assert summary["attack"]["correct_guess_detection_rate"] == 0.0
        assert all(t["adversary"]["attack"] == "intercept" for t in transcripts)

    def test_summary_only_format(self, tmp_path):
        out = tmp_path / "summary.json"
        assert main.main(["simulate", "--d", "5", "--rounds", "200", "--format", "json", "--out", str(out)]) == 0
        assert json.loads(out.read_text(encoding="utf-8"))["config"]["d"] == 5
        assert not (tmp_path / "summary.json.jsonl").exists()

    def test_intercept_needs_three_parties(self, tmp_path):
        assert main.main(["simulate", "--d", "3", "--n", "4", "--attack", "intercept", "--rounds", "10", "--out", str(tmp_path / "s")]) == 2

    def test_same_seed_gives_identical_bytes(self, tmp_path):
        args = ["simulate", "--d", "3", "--rounds", "400", "--seed", "12345"]
        assert main.main(args + ["--out", str(tmp_path / "a")]) == 0
        assert main.main(args + ["--out", str(tmp_path / "b")]) == 0
        assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
        assert (tmp_path / "a.summary.json").read_bytes() == (tmp_path / "b.summary.json").read_bytes()


class TestVerify:
    @pytest.mark.parametrize("d", ["3", "5"])
    def test_mub_passes(self, d, capsys):
        assert main.main(["verify", "--d", d, "--n", "3", "--kind", "mub"]) == 0
        err = capsys.readouterr().err
        assert "d^((1-n)/2)" in err
        assert "d^(1-n/2)" in err

    def test_mbb_passes(self):
        assert main.main(["verify", "--d", "4", "--n", "3", "--kind", "mbb"]) == 0

    def test_composite_mub_is_invalid(self):
        assert main.main(["verify", "--d", "4", "--n", "3", "--kind", "mub"]) == 2

    def test_report_file(self, tmp_path):
        out = tmp_path / "verify.json"
        assert main.main(["verify", "--d", "3", "--n", "3", "--out", str(out)]) == 0
        report = json.loads(out.read_text(encoding="utf-8"))
        assert report["passed"]
        assert report["outsider_audit"]["survivors"] == []
        assert any(check["name"] == "d=3 MBB equals MUB" for check in report["checks"])

    def test_preset(self):
        assert main.main(["--preset", "uniqueness"]) == 0
