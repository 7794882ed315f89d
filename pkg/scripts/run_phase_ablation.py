#!/usr/bin/env python3
"""Compare mutation-phase weightings on one target.

Runs the same seeded campaigns under different PublicOnly/SecretOnly/Whole
weightings and reports confirmations and executions-to-first-confirmation.
SecretOnly mutations are the ones that actually witness a leak (they probe a
known public key with fresh secrets); PublicOnly only seeds new keys, so a
PublicOnly-heavy schedule should confirm later or not at all.

Example:
    python3 scripts/run_phase_ablation.py --target leakyExample --runs 10 \
        --max-execs 20000 --out results/ablation
"""

from __future__ import annotations

import argparse
import json
import statistics
import sys
from pathlib import Path

from hyperfuzz.campaign import CampaignConfig, run_campaign

WEIGHTINGS: dict[str, tuple[float, float, float]] = {
    "balanced": (1.0, 1.0, 1.0),
    "publicHeavy": (8.0, 1.0, 1.0),
    "secretHeavy": (1.0, 8.0, 1.0),
    "wholeOnly": (0.0, 0.0, 1.0),
}


def execs_to_first_confirmation(result) -> int | None:
    if not result.hypertest_records:
        return None
    return result.hypertest_records[0]["execIndex"]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--target", default="leakyExample")
    parser.add_argument("--runs", type=int, default=10)
    parser.add_argument("--max-execs", type=int, default=20_000,
                        help="execution budget per campaign (default 20000)")
    parser.add_argument("--out", type=Path, default=Path("results/ablation"))
    ns = parser.parse_args(argv)

    rows = []
    for label, weights in WEIGHTINGS.items():
        confirmed = 0
        first_execs = []
        for seed in range(1, ns.runs + 1):
            cfg = CampaignConfig(
                target=f"builtin:{ns.target}",
                out_dir=ns.out / label / f"seed{seed:02d}",
                rng_seed=seed,
                max_execs=ns.max_execs,
                phase_weights=weights,
                stop_on_confirm=True,
            )
            result = run_campaign(cfg)
            at = execs_to_first_confirmation(result)
            if at is not None:
                confirmed += 1
                first_execs.append(at)
            print(
                f"  {label} seed={seed:02d} confirmed={result.stats.confirmed} "
                f"firstAtExec={at}",
                file=sys.stderr,
            )
        rows.append({
            "weighting": label,
            "phaseWeights": list(weights),
            "runs": ns.runs,
            "confirmedRuns": confirmed,
            "medianExecsToConfirm": (
                int(statistics.median(first_execs)) if first_execs else None
            ),
        })

    header = f"{'weighting':<14} {'weights':<16} {'confirmed':>9} {'median execs':>12}"
    print(header)
    print("-" * len(header))
    for row in rows:
        print(
            f"{row['weighting']:<14} {str(row['phaseWeights']):<16} "
            f"{row['confirmedRuns']:>6}/{row['runs']:<2} "
            f"{row['medianExecsToConfirm'] if row['medianExecsToConfirm'] is not None else '-':>12}"
        )
    summary_path = ns.out / "ablation_summary.json"
    summary_path.parent.mkdir(parents=True, exist_ok=True)
    summary_path.write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    print(f"\nwrote {summary_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
