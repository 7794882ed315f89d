"""Leak detection: the per-public-key observation table and its baselines.

The fast oracle is a hash table keyed by the public part's fingerprint.  The
first execution under a key records the secret and output; later executions
that produce an output hash never seen under that key are suspicious, because
with equal publics only the secret could have caused the difference.  A
suspicion survives only if the flakiness filter (n byte-identical reruns)
shows the output is stable, which separates genuine secret flow from
nondeterminism.  Total cost is linear in executions, versus the quadratic
pairwise self-composition baseline also provided here for ground truth.
"""

from __future__ import annotations

import json
import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .hashing import Hash64, hash64, hash_hex
from .model import HyperInput, Hypertest, ObservationEntry

log = logging.getLogger(__name__)

DEFAULT_FLAKY_RERUNS = 100
DEFAULT_MAX_ENTRIES = 1 << 24
DEFAULT_MAX_HASH_PAIRS = 64
DEFAULT_MAX_FULL_SECRETS = 16

# Rerun callback: execute the input once more, None if it crashed/timed out.
RerunFn = Callable[[HyperInput], "bytes | None"]


class VerdictKind(Enum):
    NEW_PUBLIC_KEY = "new_public_key"
    KNOWN_OUTPUT = "known_output"
    FLAKY_DISCARDED = "flaky_discarded"
    SUSPECTED_LEAK = "suspected_leak"
    LEAK_CONFIRMED = "leak_confirmed"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    hypertest: Hypertest | None = None


@dataclass
class LeakCounters:
    observations: int = 0
    keys_created: int = 0
    suspected: int = 0
    flaky_discards: int = 0
    confirmed: int = 0
    flaky_reruns: int = 0


def flakiness_check(
    inp: HyperInput,
    expected_output: bytes,
    rerun: RerunFn,
    reruns: int,
) -> bool:
    """True iff ``reruns`` consecutive reruns byte-match ``expected_output``.

    Short-circuits on the first mismatch; a crash or timeout (None) counts as
    a mismatch.
    """
    for _ in range(reruns):
        output = rerun(inp)
        if output is None or output != expected_output:
            return False
    return True


class LeakTable:
    """Observation store mapping public-part hashes to per-key history.

    Bounded on three axes: hash pairs per key (FIFO), retained full secrets
    per key (FIFO, always enough to rebuild a confirmed pair), and total keys
    (least-recently-touched keys without a suspected leak evicted first).
    """

    def __init__(
        self,
        *,
        flaky_reruns: int = DEFAULT_FLAKY_RERUNS,
        max_entries: int = DEFAULT_MAX_ENTRIES,
        max_hash_pairs: int = DEFAULT_MAX_HASH_PAIRS,
        max_full_secrets: int = DEFAULT_MAX_FULL_SECRETS,
    ) -> None:
        if flaky_reruns < 1:
            raise ValueError("flaky_reruns must be >= 1")
        if max_full_secrets < 2:
            raise ValueError("max_full_secrets must be >= 2 to rebuild a pair")
        self.flaky_reruns = flaky_reruns
        self.max_entries = max_entries
        self.max_hash_pairs = max_hash_pairs
        self.max_full_secrets = max_full_secrets
        self.entries: "OrderedDict[Hash64, ObservationEntry]" = OrderedDict()
        self.confirmed_hypertests: list[Hypertest] = []
        self.counters = LeakCounters()

    def _evict_one(self) -> None:
        victim: Hash64 | None = None
        for key, entry in self.entries.items():  # oldest first
            if len(entry.secret_inputs_full) < 2:
                victim = key
                break
        if victim is None:
            victim = next(iter(self.entries))
        del self.entries[victim]

    def observe(self, inp: HyperInput, output: bytes, rerun: RerunFn) -> Verdict:
        """Record one successful execution and classify it.

        Exactly one verdict per call; flakiness reruns happen only when a
        seen key produces a never-seen output hash.
        """
        counters = self.counters
        counters.observations += 1
        key = hash64(inp.public)
        entry = self.entries.get(key)
        output_hash = hash64(output)

        if entry is None:
            while len(self.entries) >= self.max_entries:
                self._evict_one()
            self.entries[key] = ObservationEntry(
                secret_input_hashes=[hash64(inp.secret)],
                public_output_hashes=[output_hash],
                secret_inputs_full=[inp.secret],
            )
            counters.keys_created += 1
            return Verdict(VerdictKind.NEW_PUBLIC_KEY)

        self.entries.move_to_end(key)

        if output_hash in entry.public_output_hashes:
            return Verdict(VerdictKind.KNOWN_OUTPUT)

        def counted_rerun(i: HyperInput) -> bytes | None:
            counters.flaky_reruns += 1
            return rerun(i)

        if not flakiness_check(inp, output, counted_rerun, self.flaky_reruns):
            counters.flaky_discards += 1
            return Verdict(VerdictKind.FLAKY_DISCARDED)

        counters.suspected += 1
        entry.secret_input_hashes.append(hash64(inp.secret))
        entry.public_output_hashes.append(output_hash)
        entry.secret_inputs_full.append(inp.secret)
        while len(entry.public_output_hashes) > self.max_hash_pairs:
            del entry.secret_input_hashes[0]
            del entry.public_output_hashes[0]
        while len(entry.secret_inputs_full) > self.max_full_secrets:
            del entry.secret_inputs_full[0]

        # Appends keep tails aligned: full secret i-from-the-end matches the
        # output hash i-from-the-end, so the two most recent records form the
        # witness pair.
        secret_b = entry.secret_inputs_full[-1]
        secret_a = entry.secret_inputs_full[-2]
        if secret_a == secret_b:
            return Verdict(VerdictKind.SUSPECTED_LEAK)
        hypertest = Hypertest(
            public=inp.public,
            secret_a=secret_a,
            secret_b=secret_b,
            output_hash_a=entry.public_output_hashes[-2],
            output_hash_b=entry.public_output_hashes[-1],
        )
        counters.confirmed += 1
        self.confirmed_hypertests.append(hypertest)
        return Verdict(VerdictKind.LEAK_CONFIRMED, hypertest)


class HypertestReport:
    """Deduplicating hypertest sink; one JSON object per line on disk.

    Dedup key is (public hash, unordered output-hash pair).  Write failures
    are logged and the record kept in memory so a campaign never dies on a
    full disk.
    """

    def __init__(self, path: Path | None = None) -> None:
        self.path = path
        self.records: list[dict] = []
        self._seen: set[tuple[Hash64, frozenset[Hash64]]] = set()

    def emit(self, hypertest: Hypertest, exec_index: int, wall_time_ms: float) -> bool:
        """Record a confirmed hypertest; False if an equivalent one exists."""
        key = (
            hash64(hypertest.public),
            frozenset((hypertest.output_hash_a, hypertest.output_hash_b)),
        )
        if key in self._seen:
            return False
        self._seen.add(key)
        record = {
            "publicHex": hypertest.public.hex(),
            "secretAHex": hypertest.secret_a.hex(),
            "secretBHex": hypertest.secret_b.hex(),
            "outputHashA": hash_hex(hypertest.output_hash_a),
            "outputHashB": hash_hex(hypertest.output_hash_b),
            "execIndex": exec_index,
            "wallTimeMs": round(wall_time_ms, 3),
        }
        self.records.append(record)
        if self.path is not None:
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps(record) + "\n")
            except OSError as exc:
                log.warning("could not append hypertest record to %s: %s", self.path, exc)
        return True


class GuardExceededError(RuntimeError):
    """Requested exhaustive check exceeds the pair budget."""


PAIR_GUARD = 1 << 24

ExecuteFn = Callable[[HyperInput], "bytes | None"]


def _pair_count(publics: int, secrets: int) -> int:
    return publics * (secrets * (secrets - 1) // 2)


@dataclass
class SelfCompositionResult:
    """Exact violating triples plus the number of target executions spent."""

    violations: set[tuple[bytes, bytes, bytes]]
    executions: int


def self_composition_oracle(
    execute: ExecuteFn,
    publics: Sequence[bytes],
    secrets: Sequence[bytes],
    *,
    max_pairs: int = PAIR_GUARD,
) -> SelfCompositionResult:
    """Quadratic ground-truth baseline over explicit domains.

    Evaluates each (public, secret) point exactly once (|P| x |S| executions)
    and returns every pair of secrets whose outputs differ for some public.
    Crashing points are dropped from comparison.  Refuses domains whose pair
    count exceeds ``max_pairs``.
    """
    if _pair_count(len(publics), len(secrets)) > max_pairs:
        raise GuardExceededError(
            f"{len(publics)} publics x C({len(secrets)}, 2) secret pairs exceeds {max_pairs}"
        )
    memo: dict[tuple[bytes, bytes], bytes | None] = {}
    violations: set[tuple[bytes, bytes, bytes]] = set()
    for public in publics:
        outputs: list[tuple[bytes, bytes]] = []
        for secret in secrets:
            point = (public, secret)
            if point in memo:
                output = memo[point]
            else:
                output = memo[point] = execute(HyperInput(public=public, secret=secret))
            if output is not None:
                outputs.append((secret, output))
        for i in range(len(outputs)):
            secret_a, out_a = outputs[i]
            for j in range(i + 1, len(outputs)):
                secret_b, out_b = outputs[j]
                if out_a != out_b:
                    violations.add((public, secret_a, secret_b))
    return SelfCompositionResult(violations=violations, executions=len(memo))


@dataclass
class KeyScan:
    """Grouped self-composition evidence for one public value."""

    output_groups: dict[bytes, int] = field(default_factory=dict)
    crashes: int = 0

    @property
    def successes(self) -> int:
        return sum(self.output_groups.values())

    @property
    def checked_pairs(self) -> int:
        n = self.successes
        return n * (n - 1) // 2

    @property
    def violating_pairs(self) -> int:
        # Pairs drawn from different output groups.
        n = self.successes
        same = sum(c * (c - 1) // 2 for c in self.output_groups.values())
        return n * (n - 1) // 2 - same

    @property
    def leaks(self) -> bool:
        return len(self.output_groups) > 1


def self_composition_scan(
    execute: ExecuteFn,
    publics: Iterable[bytes],
    secrets: Sequence[bytes],
) -> "OrderedDict[bytes, KeyScan]":
    """Grouped variant of the baseline: per-public output multiset, no triple
    materialization, so full 1-byte x 1-byte domains stay cheap."""
    scans: "OrderedDict[bytes, KeyScan]" = OrderedDict()
    for public in publics:
        scan = KeyScan()
        for secret in secrets:
            output = execute(HyperInput(public=public, secret=secret))
            if output is None:
                scan.crashes += 1
            else:
                scan.output_groups[output] = scan.output_groups.get(output, 0) + 1
        scans[public] = scan
    return scans
