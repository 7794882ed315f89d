"""Acceptance for the native targets: end-to-end detection through the CLI.

Criterion: for each compiled target, 20 fuzzing campaigns with distinct RNG
seeds and a 10-minute wall budget must confirm a hypertest in at least 18
runs, and replaying every produced report must exit 0.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time

from conftest import record_criterion

RUNS = 20
WALL_BUDGET_SECONDS = 600.0


def fuzz_once(binary, out_dir, seed: int) -> dict:
    proc = subprocess.run(
        [
            "hyperfuzz", "fuzz",
            "--target", f"exec:{binary}",
            "--out-dir", str(out_dir),
            "--rng-seed", str(seed),
            "--wall-seconds", str(WALL_BUDGET_SECONDS),
            "--stop-on-confirm",
        ],
        capture_output=True,
        text=True,
        timeout=WALL_BUDGET_SECONDS + 60,
    )
    assert proc.returncode == 0, proc.stderr
    return json.loads(proc.stdout)


def replay_report(binary, report) -> int:
    proc = subprocess.run(
        [
            "hyperfuzz", "replay",
            "--target", f"exec:{binary}",
            "--report", str(report),
        ],
        capture_output=True,
        text=True,
        timeout=600,
    )
    return proc.returncode


def test_criterion_9_native_end_to_end(native_binaries, tmp_path_factory):
    root = tmp_path_factory.mktemp("native-matrix")
    parts = []
    ok = True
    for name, binary in native_binaries.items():
        confirmations = 0
        replay_failures = 0
        for seed in range(1, RUNS + 1):
            out_dir = root / name / f"seed{seed:02d}"
            started = time.perf_counter()
            summary = fuzz_once(binary, out_dir, seed)
            elapsed = time.perf_counter() - started
            if summary["confirmed"] >= 1 and summary["wallTime"] <= WALL_BUDGET_SECONDS:
                confirmations += 1
            if replay_report(binary, out_dir / "hypertests.jsonl") != 0:
                replay_failures += 1
            sys.__stderr__.write(
                f"[native] {name} seed={seed:02d} execs={summary['execs']} "
                f"confirmed={summary['confirmed']} ({elapsed:.1f}s)\n"
            )
            sys.__stderr__.flush()
        parts.append(f"{name} {confirmations}/{RUNS} confirmed, "
                     f"{replay_failures} replay failures")
        if confirmations < 18 or replay_failures > 0:
            ok = False
    line = f"criterion 9, native end-to-end ({'; '.join(parts)})"
    record_criterion(f"{line}: {'PASS' if ok else 'FAIL'}")
    assert ok, line
