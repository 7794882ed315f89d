#!/usr/bin/env python3
"""Run a seeds-by-targets campaign matrix and summarize detection efficacy.

For each selected builtin target, runs N campaigns with distinct RNG seeds
and a fixed wall budget, then reports how many runs confirmed a hypertest,
the median time-to-first-confirmation, and throughput. This is the script
behind the headline "18/20 within budget" style tables.

Example:
    python3 scripts/run_efficacy_matrix.py --runs 20 --wall-seconds 60 \
        --out results/matrix
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
import time
from pathlib import Path

from hyperfuzz.campaign import CampaignConfig, run_campaign
from hyperfuzz.targets import get_target, target_names


def run_matrix(
    targets: list[str],
    runs: int,
    wall_seconds: float,
    out_root: Path,
    stop_on_confirm: bool,
) -> list[dict]:
    rows = []
    for name in targets:
        spec = get_target(name)
        confirmations = 0
        first_confirm_times = []
        total_execs = 0
        for seed in range(1, runs + 1):
            cfg = CampaignConfig(
                target=f"builtin:{name}",
                out_dir=out_root / name / f"seed{seed:02d}",
                rng_seed=seed,
                wall_seconds=wall_seconds,
                stop_on_confirm=stop_on_confirm and spec.expected_leak,
            )
            started = time.perf_counter()
            result = run_campaign(cfg)
            elapsed = time.perf_counter() - started
            total_execs += result.stats.execs
            if result.stats.confirmed >= 1:
                confirmations += 1
                first_confirm_times.append(elapsed)
            print(
                f"  {name} seed={seed:02d} execs={result.stats.execs} "
                f"confirmed={result.stats.confirmed} wall={elapsed:.1f}s",
                file=sys.stderr,
            )
        rows.append({
            "target": name,
            "expectedLeak": spec.expected_leak,
            "leakClass": spec.leak_class.value,
            "runs": runs,
            "confirmedRuns": confirmations,
            "medianTimeToConfirm": (
                round(statistics.median(first_confirm_times), 3)
                if first_confirm_times else None
            ),
            "totalExecs": total_execs,
        })
    return rows


def print_table(rows: list[dict]) -> None:
    header = f"{'target':<18} {'class':<18} {'confirmed':>9} {'median t':>9} {'execs':>12}"
    print(header)
    print("-" * len(header))
    for row in rows:
        median = row["medianTimeToConfirm"]
        print(
            f"{row['target']:<18} {row['leakClass']:<18} "
            f"{row['confirmedRuns']:>6}/{row['runs']:<2} "
            f"{median if median is not None else '-':>9} "
            f"{row['totalExecs']:>12}"
        )


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--targets", nargs="*", default=None,
                        help="builtin target names (default: all)")
    parser.add_argument("--runs", type=int, default=20,
                        help="campaigns per target (default 20)")
    parser.add_argument("--wall-seconds", type=float, default=60.0,
                        help="wall budget per campaign (default 60)")
    parser.add_argument("--out", type=Path, default=Path("results/matrix"),
                        help="root directory for campaign outputs")
    parser.add_argument("--no-stop-on-confirm", action="store_true",
                        help="run full budget even after a confirmation")
    ns = parser.parse_args(argv)

    targets = ns.targets if ns.targets else target_names()
    for name in targets:
        get_target(name)  # fail fast on typos

    rows = run_matrix(
        targets, ns.runs, ns.wall_seconds, ns.out,
        stop_on_confirm=not ns.no_stop_on_confirm,
    )
    print_table(rows)
    summary_path = ns.out / "matrix_summary.json"
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    summary_path.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    print(f"\nwrote {summary_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
