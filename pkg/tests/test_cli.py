"""CLI surface: domain parsing, exit codes, and end-to-end subcommand runs."""

from __future__ import annotations

import json
import subprocess

import pytest

import hyperfuzz.cli as cli
from hyperfuzz.campaign import ConfigError
from hyperfuzz.cli import main, parse_domain


def run_cli(capsys, argv: list[str]) -> tuple[int, str, str]:
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


class TestParseDomain:
    def test_empty(self):
        assert parse_domain("empty") == [b""]

    def test_full_byte(self):
        values = parse_domain("byte")
        assert len(values) == 256
        assert values[0] == b"\x00"
        assert values[255] == b"\xff"

    def test_byte_range(self):
        assert parse_domain("byte:0..3") == [b"\x00", b"\x01", b"\x02", b"\x03"]
        assert parse_domain("byte:5..5") == [b"\x05"]

    @pytest.mark.parametrize(
        "text",
        ["", "bytes", "byte:", "byte:3..2", "byte:0..256", "byte:-1..5",
         "byte:a..b", "byte:1", "nibble"],
    )
    def test_bad_domains_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_domain(text)


class TestFuzzCommand:
    def test_fuzz_summary_and_exit_code(self, tmp_path, capsys):
        rc, out, _ = run_cli(capsys, [
            "fuzz", "--target", "builtin:isLarge",
            "--out-dir", str(tmp_path / "out"),
            "--max-execs", "400", "--rng-seed", "3",
        ])
        assert rc == 0
        summary = json.loads(out)
        assert summary["execs"] == 400
        assert summary["outDir"] == str(tmp_path / "out")
        assert "hypertests" in summary
        assert (tmp_path / "out" / "hypertests.jsonl").is_file()

    def test_unknown_target_exits_2(self, tmp_path, capsys):
        rc, _, err = run_cli(capsys, [
            "fuzz", "--target", "builtin:nope",
            "--out-dir", str(tmp_path / "out"), "--max-execs", "1",
        ])
        assert rc == 2
        assert "error:" in err

    def test_missing_budget_exits_2(self, tmp_path, capsys):
        rc, _, err = run_cli(capsys, [
            "fuzz", "--target", "builtin:isLarge",
            "--out-dir", str(tmp_path / "out"),
        ])
        assert rc == 2
        assert "budget" in err

    def test_bad_phase_weights_exit_2(self, tmp_path, capsys):
        rc, _, _ = run_cli(capsys, [
            "fuzz", "--target", "builtin:isLarge",
            "--out-dir", str(tmp_path / "out"), "--max-execs", "1",
            "--phase-weights", "1,2",
        ])
        assert rc == 2

    def test_stop_on_confirm_flag(self, tmp_path, capsys):
        rc, out, _ = run_cli(capsys, [
            "fuzz", "--target", "builtin:isLarge",
            "--out-dir", str(tmp_path / "out"),
            "--max-execs", "100000", "--stop-on-confirm",
        ])
        assert rc == 0
        summary = json.loads(out)
        assert summary["confirmed"] >= 1
        assert summary["execs"] < 100_000


@pytest.fixture(scope="module")
def confirmed_report(tmp_path_factory):
    """One stop-on-confirm campaign whose report has at least one record."""
    out_dir = tmp_path_factory.mktemp("campaign")
    rc = main([
        "fuzz", "--target", "builtin:isLarge", "--out-dir", str(out_dir),
        "--max-execs", "100000", "--stop-on-confirm",
    ])
    assert rc == 0
    report = out_dir / "hypertests.jsonl"
    assert report.read_text().strip()
    return report


class TestReplayCommand:
    def test_replay_valid_report_exits_0(self, confirmed_report, capsys):
        rc, out, _ = run_cli(capsys, [
            "replay", "--target", "builtin:isLarge",
            "--report", str(confirmed_report),
        ])
        assert rc == 0
        assert "PASS" in out
        assert "0 failures" in out

    def test_forged_identical_secrets_fail(self, tmp_path, capsys):
        record = {
            "publicHex": "", "secretAHex": "05", "secretBHex": "05",
            "outputHashA": "0" * 16, "outputHashB": "1" * 16,
            "execIndex": 1, "wallTimeMs": 0.0,
        }
        report = tmp_path / "forged.jsonl"
        report.write_text(json.dumps(record) + "\n")
        rc, out, _ = run_cli(capsys, [
            "replay", "--target", "builtin:isLarge", "--report", str(report),
        ])
        assert rc == 1
        assert "secrets identical" in out

    def test_forged_identical_outputs_fail(self, tmp_path, capsys):
        # Secrets 0 and 1 are both "not large", so outputs match.
        record = {
            "publicHex": "", "secretAHex": "00", "secretBHex": "01",
            "outputHashA": "0" * 16, "outputHashB": "1" * 16,
            "execIndex": 1, "wallTimeMs": 0.0,
        }
        report = tmp_path / "forged.jsonl"
        report.write_text(json.dumps(record) + "\n")
        rc, out, _ = run_cli(capsys, [
            "replay", "--target", "builtin:isLarge", "--report", str(report),
        ])
        assert rc == 1
        assert "outputs identical" in out

    def test_unstable_target_fails_replay(self, confirmed_report, capsys):
        rc, out, _ = run_cli(capsys, [
            "replay", "--target", "builtin:flakyCounter",
            "--report", str(confirmed_report),
        ])
        assert rc == 1
        assert "unstable or crashing" in out

    def test_blank_lines_skipped(self, tmp_path, capsys):
        report = tmp_path / "empty.jsonl"
        report.write_text("\n\n")
        rc, out, _ = run_cli(capsys, [
            "replay", "--target", "builtin:isLarge", "--report", str(report),
        ])
        assert rc == 0
        assert "replayed 0 records" in out


class TestCheckExhaustiveCommand:
    def test_is_large_small_domain(self, capsys):
        rc, out, _ = run_cli(capsys, [
            "check-exhaustive", "--target", "builtin:isLarge",
            "--public-domain", "empty", "--secret-domain", "byte:0..3",
        ])
        assert rc == 0
        verdict = json.loads(out)
        assert verdict["violatingPairs"] == 3
        assert verdict["pairsChecked"] == 6
        assert verdict["leak"] is True
        assert verdict["agreement"] is True
        assert verdict["mismatchedKeys"] == []
        assert verdict["scanExecutions"] == 4

    def test_safe_target_reports_no_leak(self, capsys):
        rc, out, _ = run_cli(capsys, [
            "check-exhaustive", "--target", "builtin:constantSafe",
            "--public-domain", "byte:0..1", "--secret-domain", "byte:0..7",
        ])
        assert rc == 0
        verdict = json.loads(out)
        assert verdict["violatingPairs"] == 0
        assert verdict["leak"] is False
        assert verdict["agreement"] is True

    def test_flaky_target_attributed_to_nondeterminism(self, capsys):
        rc, out, _ = run_cli(capsys, [
            "check-exhaustive", "--target", "builtin:flakyCounter",
            "--public-domain", "byte:0..1", "--secret-domain", "byte:0..3",
        ])
        assert rc == 0
        verdict = json.loads(out)
        assert verdict["flakyKeys"] == 2
        assert verdict["leak"] is False
        assert verdict["agreement"] is True

    def test_bad_domain_exits_2(self, capsys):
        rc, _, err = run_cli(capsys, [
            "check-exhaustive", "--target", "builtin:isLarge",
            "--public-domain", "bogus",
        ])
        assert rc == 2
        assert "bad domain" in err

    def test_pair_guard_exits_2(self, capsys, monkeypatch):
        monkeypatch.setattr(cli, "PAIR_GUARD", 5)
        rc, _, err = run_cli(capsys, [
            "check-exhaustive", "--target", "builtin:isLarge",
            "--public-domain", "empty", "--secret-domain", "byte:0..7",
        ])
        assert rc == 2
        assert "guard" in err


class TestConsoleScript:
    def test_help_smoke(self):
        proc = subprocess.run(
            ["hyperfuzz", "--help"], capture_output=True, text=True, timeout=30
        )
        assert proc.returncode == 0
        assert "fuzz" in proc.stdout
        assert "replay" in proc.stdout
        assert "check-exhaustive" in proc.stdout

    def test_subcommand_required(self):
        proc = subprocess.run(
            ["hyperfuzz"], capture_output=True, text=True, timeout=30
        )
        assert proc.returncode == 2
