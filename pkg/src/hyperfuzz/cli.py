"""Command-line front end: fuzz, replay, check-exhaustive.

Exit codes: ``fuzz`` 0 on any graceful stop / 2 on configuration errors;
``replay`` 0 iff every report record still witnesses a stable leak, else 1;
``check-exhaustive`` 0 when the fast oracle agrees with exhaustive
self-composition, 1 on disagreement, 2 when the domain exceeds the pair
guard or the configuration is invalid.
"""

from __future__ import annotations

import argparse
import json
import signal
import sys
from pathlib import Path

from .campaign import (
    CampaignConfig,
    ConfigError,
    build_executor,
    run_campaign,
)
from .executor import ExecStatus, Executor
from .model import HyperInput
from .mutation import DEFAULT_PHASE_WEIGHTS
from .oracle import (
    DEFAULT_FLAKY_RERUNS,
    PAIR_GUARD,
    LeakTable,
    VerdictKind,
    self_composition_scan,
)

_DOMAIN_HELP = "'empty', 'byte', or 'byte:A..B' (inclusive byte-value range)"


def parse_domain(text: str) -> list[bytes]:
    """Expand a domain spec into concrete part values."""
    if text == "empty":
        return [b""]
    if text == "byte":
        return [bytes([v]) for v in range(256)]
    if text.startswith("byte:"):
        lo_txt, sep, hi_txt = text[len("byte:"):].partition("..")
        if sep:
            try:
                lo, hi = int(lo_txt), int(hi_txt)
            except ValueError:
                raise ConfigError(f"bad domain {text!r}; expected {_DOMAIN_HELP}") from None
            if 0 <= lo <= hi <= 255:
                return [bytes([v]) for v in range(lo, hi + 1)]
    raise ConfigError(f"bad domain {text!r}; expected {_DOMAIN_HELP}")


def _parse_phase_weights(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise ConfigError("--phase-weights needs three comma-separated numbers")
    try:
        return tuple(float(p) for p in parts)  # type: ignore[return-value]
    except ValueError:
        raise ConfigError(f"bad --phase-weights {text!r}") from None


def _add_executor_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--target", required=True,
                        help="'builtin:<name>' or 'exec:<path to harness binary>'")
    parser.add_argument("--flaky-reruns", type=int, default=DEFAULT_FLAKY_RERUNS,
                        help="byte-identical reruns required to trust an output difference")
    parser.add_argument("--no-mem-fill", action="store_true",
                        help="disable secret-derived memory poisoning (memory reads as zeros)")
    parser.add_argument("--timeout-ms", type=int, default=1000)
    parser.add_argument("--arena-size", type=int, default=4096)


def cmd_fuzz(ns: argparse.Namespace) -> int:
    cfg = CampaignConfig(
        target=ns.target,
        out_dir=Path(ns.out_dir),
        seed_dir=Path(ns.seed_dir) if ns.seed_dir else None,
        rng_seed=ns.rng_seed,
        wall_seconds=ns.wall_seconds,
        max_execs=ns.max_execs,
        flaky_reruns=ns.flaky_reruns,
        mem_fill=not ns.no_mem_fill,
        phase_weights=_parse_phase_weights(ns.phase_weights),
        timeout_ms=ns.timeout_ms,
        arena_size=ns.arena_size,
        stop_on_confirm=ns.stop_on_confirm,
    )
    cfg.validate()

    interrupted = {"flag": False}

    def request_stop(_signum: int, _frame: object) -> None:
        interrupted["flag"] = True

    previous = {}
    for sig in (signal.SIGINT, signal.SIGTERM):
        try:
            previous[sig] = signal.signal(sig, request_stop)
        except ValueError:  # not the main thread
            pass
    try:
        result = run_campaign(cfg, stop_flag=lambda: interrupted["flag"])
    finally:
        for sig, handler in previous.items():
            signal.signal(sig, handler)

    summary = result.stats.to_json_dict()
    summary["hypertests"] = len(result.hypertest_records)
    summary["outDir"] = str(result.out_dir)
    print(json.dumps(summary))
    return 0


def _replay_side(executor: Executor, inp: HyperInput, reruns: int) -> bytes | None:
    """Output iff all ``reruns`` executions succeed with identical bytes."""
    reference: bytes | None = None
    for _ in range(reruns):
        result = executor.execute(inp, collect_coverage=False)
        if result.status is not ExecStatus.OK:
            return None
        if reference is None:
            reference = result.output
        elif result.output != reference:
            return None
    return reference


def cmd_replay(ns: argparse.Namespace) -> int:
    executor = build_executor(
        ns.target,
        mem_fill=not ns.no_mem_fill,
        timeout_ms=ns.timeout_ms,
        arena_size=ns.arena_size,
    )
    report_path = Path(ns.report)
    failures = 0
    records = 0
    with open(report_path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            records += 1
            record = json.loads(line)
            public = bytes.fromhex(record["publicHex"])
            secret_a = bytes.fromhex(record["secretAHex"])
            secret_b = bytes.fromhex(record["secretBHex"])
            if secret_a == secret_b:
                print(f"record {line_no}: FAIL (secrets identical)")
                failures += 1
                continue
            out_a = _replay_side(executor, HyperInput(public, secret_a), ns.flaky_reruns)
            out_b = _replay_side(executor, HyperInput(public, secret_b), ns.flaky_reruns)
            if out_a is None or out_b is None:
                print(f"record {line_no}: FAIL (unstable or crashing side)")
                failures += 1
            elif out_a == out_b:
                print(f"record {line_no}: FAIL (outputs identical)")
                failures += 1
            else:
                print(f"record {line_no}: PASS")
    close = getattr(executor, "close", None)
    if close is not None:
        close()
    print(f"replayed {records} records, {failures} failures")
    return 0 if failures == 0 else 1


def cmd_check_exhaustive(ns: argparse.Namespace) -> int:
    publics = parse_domain(ns.public_domain)
    secrets = parse_domain(ns.secret_domain)
    pair_count = len(publics) * (len(secrets) * (len(secrets) - 1) // 2)
    if pair_count > PAIR_GUARD:
        print(
            f"error: {len(publics)} publics x C({len(secrets)},2) = {pair_count} "
            f"pairs exceeds the guard ({PAIR_GUARD})",
            file=sys.stderr,
        )
        return 2

    executor = build_executor(
        ns.target,
        mem_fill=not ns.no_mem_fill,
        timeout_ms=ns.timeout_ms,
        arena_size=ns.arena_size,
    )

    def run_once(inp: HyperInput) -> bytes | None:
        result = executor.execute(inp, collect_coverage=False)
        return result.output if result.status is ExecStatus.OK else None

    print(f"self-composition scan: {len(publics)} publics x {len(secrets)} secrets",
          file=sys.stderr)
    scans = self_composition_scan(run_once, publics, secrets)
    scan_execs = executor.total_executions

    print("observation sweep with flakiness filtering", file=sys.stderr)
    table = LeakTable(flaky_reruns=ns.flaky_reruns)
    leak_keys: set[bytes] = set()
    flaky_keys: set[bytes] = set()
    sweep_crashes = 0
    for public in publics:
        for secret in secrets:
            inp = HyperInput(public=public, secret=secret)
            result = executor.execute(inp, collect_coverage=False)
            if result.status is not ExecStatus.OK:
                sweep_crashes += 1
                continue
            verdict = table.observe(inp, result.output, run_once)
            if verdict.kind in (VerdictKind.LEAK_CONFIRMED, VerdictKind.SUSPECTED_LEAK):
                leak_keys.add(public)
            elif verdict.kind is VerdictKind.FLAKY_DISCARDED:
                flaky_keys.add(public)

    mismatched: list[str] = []
    stable_leak = False
    for public, scan in scans.items():
        if public in flaky_keys:
            # Self-composition assumes determinism; a key with flaky discards
            # provides no trustworthy pairwise evidence, so it is excluded and
            # its raw differences attributed to nondeterminism.
            continue
        fast_leak = public in leak_keys
        if scan.leaks != fast_leak:
            mismatched.append(public.hex())
        elif fast_leak:
            stable_leak = True

    verdict = {
        "target": ns.target,
        "publicDomain": len(publics),
        "secretDomain": len(secrets),
        "scanExecutions": scan_execs,
        "sweepExecutions": executor.total_executions - scan_execs,
        "pairsChecked": sum(s.checked_pairs for s in scans.values()),
        "violatingPairs": sum(s.violating_pairs for s in scans.values()),
        "crashes": sum(s.crashes for s in scans.values()) + sweep_crashes,
        "flakyKeys": len(flaky_keys),
        "mismatchedKeys": mismatched,
        "agreement": not mismatched,
        "leak": stable_leak,
    }
    close = getattr(executor, "close", None)
    if close is not None:
        close()
    print(json.dumps(verdict))
    return 0 if not mismatched else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperfuzz",
        description="Grey-box fuzzer for noninterference: finds secret-dependent "
                    "output differences and reports them as replayable hypertests.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fuzz = sub.add_parser("fuzz", help="run a fuzzing campaign")
    _add_executor_flags(fuzz)
    fuzz.add_argument("--out-dir", required=True, help="campaign output directory")
    fuzz.add_argument("--seed-dir", default=None, help="directory of encoded seed inputs")
    fuzz.add_argument("--rng-seed", type=int, default=0)
    fuzz.add_argument("--wall-seconds", type=float, default=None)
    fuzz.add_argument("--max-execs", type=int, default=None)
    fuzz.add_argument("--phase-weights", default=",".join(str(w) for w in DEFAULT_PHASE_WEIGHTS),
                      help="PublicOnly,SecretOnly,Whole selection weights")
    fuzz.add_argument("--stop-on-confirm", action="store_true",
                      help="stop at the first confirmed hypertest")

    replay = sub.add_parser("replay", help="re-validate a hypertest report")
    _add_executor_flags(replay)
    replay.add_argument("--report", required=True, help="hypertests.jsonl to replay")

    check = sub.add_parser("check-exhaustive",
                           help="compare the fast oracle with exhaustive self-composition")
    _add_executor_flags(check)
    check.add_argument("--public-domain", default="byte", help=_DOMAIN_HELP)
    check.add_argument("--secret-domain", default="byte", help=_DOMAIN_HELP)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    handlers = {
        "fuzz": cmd_fuzz,
        "replay": cmd_replay,
        "check-exhaustive": cmd_check_exhaustive,
    }
    try:
        return handlers[ns.command](ns)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
