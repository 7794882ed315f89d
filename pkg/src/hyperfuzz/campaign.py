"""Campaign driver: the fuzzing loop that ties executor, mutators, and oracle.

Loop shape per iteration: schedule a queue entry, pick a mutation phase,
mutate, execute once, feed the result to the leak table (crashes and timeouts
are saved but never observed), then keep the mutant iff it reached new
coverage buckets.  Flakiness reruns happen inside the oracle and are counted
separately from the execution budget.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .coverage import CoverageMap, is_interesting
from .executor import (
    DEFAULT_ARENA_SIZE,
    DEFAULT_TIMEOUT_MS,
    ExecStatus,
    Executor,
    ExternalExecutor,
    InProcessExecutor,
)
from .hashing import hash_hex
from .model import HyperInput, decode, encode
from .mutation import (
    DEFAULT_PHASE_WEIGHTS,
    MutationPhase,
    PhaseWeights,
    choose_phase,
    mutate,
    validate_phase_weights,
)
from .oracle import (
    DEFAULT_FLAKY_RERUNS,
    HypertestReport,
    LeakTable,
    Verdict,
    VerdictKind,
)
from .targets import get_target

BUILTIN_PREFIX = "builtin:"
EXEC_PREFIX = "exec:"

STATS_INTERVAL_SECONDS = 5.0

StopFlag = Callable[[], bool]


class ConfigError(ValueError):
    """Invalid campaign configuration (unknown target, bad weights, ...)."""


@dataclass
class CampaignConfig:
    """Everything a campaign needs; validated before any execution."""

    target: str
    out_dir: Path
    seed_dir: Path | None = None
    rng_seed: int = 0
    wall_seconds: float | None = None
    max_execs: int | None = None
    flaky_reruns: int = DEFAULT_FLAKY_RERUNS
    mem_fill: bool = True
    phase_weights: PhaseWeights = DEFAULT_PHASE_WEIGHTS
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    arena_size: int = DEFAULT_ARENA_SIZE
    stop_on_confirm: bool = False

    def validate(self) -> None:
        validate_target(self.target)
        if self.wall_seconds is None and self.max_execs is None:
            raise ConfigError("need a wall_seconds or max_execs budget")
        if self.wall_seconds is not None and self.wall_seconds < 0:
            raise ConfigError("wall_seconds must be non-negative")
        if self.max_execs is not None and self.max_execs < 0:
            raise ConfigError("max_execs must be non-negative")
        if self.flaky_reruns < 1:
            raise ConfigError("flaky_reruns must be >= 1")
        if self.timeout_ms <= 0:
            raise ConfigError("timeout_ms must be positive")
        if self.arena_size <= 0:
            raise ConfigError("arena_size must be positive")
        try:
            validate_phase_weights(self.phase_weights)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def to_json_dict(self) -> dict:
        return {
            "target": self.target,
            "outDir": str(self.out_dir),
            "seedDir": str(self.seed_dir) if self.seed_dir is not None else None,
            "rngSeed": self.rng_seed,
            "wallSeconds": self.wall_seconds,
            "maxExecs": self.max_execs,
            "flakyReruns": self.flaky_reruns,
            "memFill": self.mem_fill,
            "phaseWeights": list(self.phase_weights),
            "timeoutMs": self.timeout_ms,
            "arenaSize": self.arena_size,
            "stopOnConfirm": self.stop_on_confirm,
        }


@dataclass
class QueueEntry:
    """Corpus member: an input that reached a new coverage bucket."""

    input: HyperInput
    exec_index: int
    coverage_digest: int
    size: int
    favored: bool = False


@dataclass
class CampaignStats:
    """Snapshot written to stats.jsonl and returned at campaign end."""

    execs: int = 0
    execs_per_sec: float = 0.0
    queue_len: int = 0
    unique_public_keys: int = 0
    suspected: int = 0
    confirmed: int = 0
    flaky_discards: int = 0
    flaky_reruns: int = 0
    crashes: int = 0
    timeouts: int = 0
    wall_time: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "execs": self.execs,
            "execsPerSec": round(self.execs_per_sec, 2),
            "queueLen": self.queue_len,
            "uniquePublicKeys": self.unique_public_keys,
            "suspected": self.suspected,
            "confirmed": self.confirmed,
            "flakyDiscards": self.flaky_discards,
            "flakyReruns": self.flaky_reruns,
            "crashes": self.crashes,
            "timeouts": self.timeouts,
            "wallTime": round(self.wall_time, 3),
        }


@dataclass
class CampaignResult:
    """Final state handed back to callers (CLI, tests, experiment scripts)."""

    stats: CampaignStats
    hypertest_records: list[dict]
    queue_files: list[str]
    crash_files: list[str]
    out_dir: Path
    # Verdict kind per observed execution, for determinism checks.
    verdict_trace: list[str] = field(default_factory=list)
    inputs_generated: int = 0
    executor_total: int = 0


def validate_target(target: str) -> None:
    """Check a target spec string (``builtin:<name>`` or ``exec:<path>``)."""
    if target.startswith(BUILTIN_PREFIX):
        try:
            get_target(target[len(BUILTIN_PREFIX):])
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
    elif target.startswith(EXEC_PREFIX):
        path = Path(target[len(EXEC_PREFIX):])
        if not path.is_file():
            raise ConfigError(f"target executable not found: {path}")
    else:
        raise ConfigError(f"target must start with {BUILTIN_PREFIX!r} or {EXEC_PREFIX!r}")


def build_executor(
    target: str,
    *,
    mem_fill: bool = True,
    timeout_ms: int = DEFAULT_TIMEOUT_MS,
    arena_size: int = DEFAULT_ARENA_SIZE,
) -> Executor:
    """Instantiate the executor named by a target spec string."""
    validate_target(target)
    if target.startswith(BUILTIN_PREFIX):
        spec = get_target(target[len(BUILTIN_PREFIX):])
        return InProcessExecutor(
            spec.factory(),
            arena_size=arena_size,
            mem_fill=mem_fill,
            timeout_ms=timeout_ms,
        )
    return ExternalExecutor(
        target[len(EXEC_PREFIX):],
        mem_fill=mem_fill,
        timeout_ms=timeout_ms,
    )


def load_seeds(seed_dir: Path | None) -> list[HyperInput]:
    """Decode every regular file in ``seed_dir``; default seed when absent."""
    if seed_dir is None:
        return [HyperInput()]
    seeds = [
        decode(path.read_bytes())
        for path in sorted(seed_dir.iterdir())
        if path.is_file()
    ]
    return seeds or [HyperInput()]


class _Scheduler:
    """Deterministic favored-biased round-robin over the queue.

    Favored entries are the smallest input seen per covered edge; two of
    every three picks come from the favored set while one exists.
    """

    def __init__(self) -> None:
        self._best_per_edge: dict[int, tuple[int, int]] = {}
        self._favored_ids: list[int] = []
        self._dirty = False
        self._picks = 0
        self._favored_cursor = 0
        self._all_cursor = 0

    def on_enqueue(self, entry_id: int, size: int, coverage: CoverageMap) -> None:
        best = self._best_per_edge
        for edge in coverage.touched:
            cur = best.get(edge)
            if cur is None or size < cur[0]:
                best[edge] = (size, entry_id)
                self._dirty = True

    def next_id(self, queue_len: int) -> int:
        if self._dirty:
            self._favored_ids = sorted({eid for _, eid in self._best_per_edge.values()})
            self._dirty = False
        self._picks += 1
        if self._favored_ids and self._picks % 3 != 0:
            self._favored_cursor = (self._favored_cursor + 1) % len(self._favored_ids)
            return self._favored_ids[self._favored_cursor]
        self._all_cursor = (self._all_cursor + 1) % queue_len
        return self._all_cursor

    def favored_ids(self) -> set[int]:
        if self._dirty:
            self._favored_ids = sorted({eid for _, eid in self._best_per_edge.values()})
            self._dirty = False
        return set(self._favored_ids)


def run_campaign(cfg: CampaignConfig, stop_flag: StopFlag | None = None) -> CampaignResult:
    """Run one fuzzing campaign to budget exhaustion (or confirmed stop).

    Writes the standard layout under ``cfg.out_dir``: queue/ and crashes/
    hold encoded inputs named ``<execIndex>-<coverageDigest>``, hypertests
    land in hypertests.jsonl as they are confirmed, stats.jsonl gets a
    snapshot at least every 5 seconds of activity, and fuzzer_setup.json
    records the exact configuration.
    """
    cfg.validate()
    out_dir = Path(cfg.out_dir)
    queue_dir = out_dir / "queue"
    crash_dir = out_dir / "crashes"
    queue_dir.mkdir(parents=True, exist_ok=True)
    crash_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "fuzzer_setup.json").write_text(
        json.dumps(cfg.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )
    stats_path = out_dir / "stats.jsonl"
    stats_path.write_text("", encoding="utf-8")
    report_path = out_dir / "hypertests.jsonl"
    report_path.write_text("", encoding="utf-8")

    executor = build_executor(
        cfg.target,
        mem_fill=cfg.mem_fill,
        timeout_ms=cfg.timeout_ms,
        arena_size=cfg.arena_size,
    )
    table = LeakTable(flaky_reruns=cfg.flaky_reruns)
    report = HypertestReport(report_path)
    rng = random.Random(cfg.rng_seed)
    global_cov = CoverageMap()
    scheduler = _Scheduler()
    queue: list[QueueEntry] = []
    queue_files: list[str] = []
    crash_files: list[str] = []
    verdict_trace: list[str] = []

    stats = CampaignStats()
    start = time.monotonic()
    last_snap_time = start
    last_snap_execs = 0
    inputs_generated = 0
    stop_requested = False

    def wall() -> float:
        return time.monotonic() - start

    def budget_left() -> bool:
        if stop_requested:
            return False
        if stop_flag is not None and stop_flag():
            return False
        if cfg.max_execs is not None and stats.execs >= cfg.max_execs:
            return False
        if cfg.wall_seconds is not None and wall() >= cfg.wall_seconds:
            return False
        return True

    def fill_stats() -> CampaignStats:
        elapsed = wall()
        stats.execs_per_sec = stats.execs / elapsed if elapsed > 0 else 0.0
        stats.queue_len = len(queue)
        stats.unique_public_keys = table.counters.keys_created
        stats.suspected = table.counters.suspected
        stats.confirmed = table.counters.confirmed
        stats.flaky_discards = table.counters.flaky_discards
        stats.flaky_reruns = table.counters.flaky_reruns
        stats.wall_time = elapsed
        return stats

    def snapshot(force: bool = False) -> None:
        nonlocal last_snap_time, last_snap_execs
        now = time.monotonic()
        if not force and now - last_snap_time < STATS_INTERVAL_SECONDS:
            return
        if stats.execs == last_snap_execs:
            return
        fill_stats()
        with open(stats_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(stats.to_json_dict()) + "\n")
        last_snap_time = now
        last_snap_execs = stats.execs

    def rerun(inp: HyperInput) -> bytes | None:
        result = executor.execute(inp, collect_coverage=False)
        return result.output if result.status is ExecStatus.OK else None

    def save_blob(directory: Path, name: str, inp: HyperInput) -> str:
        (directory / name).write_bytes(encode(inp))
        return name

    def handle_observed(inp: HyperInput, output: bytes) -> Verdict:
        nonlocal stop_requested
        verdict = table.observe(inp, output, rerun)
        verdict_trace.append(verdict.kind.value)
        if verdict.kind is VerdictKind.LEAK_CONFIRMED and verdict.hypertest is not None:
            report.emit(verdict.hypertest, stats.execs, wall() * 1000.0)
            if cfg.stop_on_confirm:
                stop_requested = True
        return verdict

    def enqueue(inp: HyperInput, coverage: CoverageMap) -> None:
        digest = coverage.digest()
        entry = QueueEntry(
            input=inp,
            exec_index=stats.execs,
            coverage_digest=digest,
            size=len(inp.public) + len(inp.secret),
        )
        queue.append(entry)
        entry_id = len(queue) - 1
        scheduler.on_enqueue(entry_id, entry.size, coverage)
        queue_files.append(
            save_blob(queue_dir, f"{entry.exec_index:06d}-{hash_hex(digest)}", inp)
        )

    # Seed phase: every seed is executed, observed, and enqueued regardless
    # of coverage (the queue must never start empty).
    for seed in load_seeds(cfg.seed_dir):
        if not budget_left():
            break
        inputs_generated += 1
        result = executor.execute(seed)
        stats.execs += 1
        if result.status is ExecStatus.OK:
            handle_observed(seed, result.output)
            is_interesting(result.coverage, global_cov)
            enqueue(seed, result.coverage)
        else:
            if result.status is ExecStatus.CRASH:
                stats.crashes += 1
            else:
                stats.timeouts += 1
            crash_files.append(
                save_blob(
                    crash_dir,
                    f"{stats.execs:06d}-{result.status.value}",
                    seed,
                )
            )
        snapshot()

    # Main loop.
    while queue and budget_left():
        entry = queue[scheduler.next_id(len(queue))]
        phase = choose_phase(rng, cfg.phase_weights)
        candidate = mutate(entry.input, phase, rng, corpus=queue_inputs(queue, rng))
        inputs_generated += 1
        result = executor.execute(candidate)
        stats.execs += 1
        if result.status is ExecStatus.OK:
            handle_observed(candidate, result.output)
            if is_interesting(result.coverage, global_cov):
                enqueue(candidate, result.coverage)
        else:
            if result.status is ExecStatus.CRASH:
                stats.crashes += 1
            else:
                stats.timeouts += 1
            crash_files.append(
                save_blob(
                    crash_dir,
                    f"{stats.execs:06d}-{result.status.value}",
                    candidate,
                )
            )
        snapshot()

    snapshot(force=True)
    fill_stats()
    for fav_id in scheduler.favored_ids():
        queue[fav_id].favored = True
    close = getattr(executor, "close", None)
    if close is not None:
        close()
    return CampaignResult(
        stats=stats,
        hypertest_records=report.records,
        queue_files=queue_files,
        crash_files=crash_files,
        out_dir=out_dir,
        verdict_trace=verdict_trace,
        inputs_generated=inputs_generated,
        executor_total=executor.total_executions,
    )


def queue_inputs(queue: list[QueueEntry], rng: random.Random) -> list[HyperInput]:
    """Small splice-donor sample; full queue when short, else 8 random picks."""
    if len(queue) <= 8:
        return [e.input for e in queue]
    return [queue[rng.randrange(len(queue))].input for _ in range(8)]
