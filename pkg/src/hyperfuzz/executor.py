"""Target execution: memory poisoning, in-process calls, external processes.

Every execution is hermetic.  Before the target runs, its scratch memory is
pre-filled with an 8-byte pattern derived deterministically from the secret
part, so a read of "uninitialized" memory yields a secret-dependent but
reproducible value instead of noise.  With filling disabled the same memory
is all zeros, modelling OS-zeroed pages; secret-independent by construction.
"""

from __future__ import annotations

import mmap
import os
import subprocess
import time
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Protocol

from .coverage import MAP_SIZE, CoverageMap
from .model import HyperInput, encode

SHM_ENV = "HYPERFUZZ_SHM_ID"
NO_FILL_ENV = "HYPERFUZZ_NO_FILL"
SHM_DIR = "/dev/shm"

DEFAULT_ARENA_SIZE = 4096
DEFAULT_TIMEOUT_MS = 1000

# Fallback pattern when the secret-derived pattern would be all zeros (secret
# empty or degenerate): still a visible, non-zero poison value.
FALLBACK_PATTERN = b"\xa5" * 8

_MASK = 0xFFFFFFFFFFFFFFFF


def splitmix64_next(state: int) -> tuple[int, int]:
    """One SplitMix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, z ^ (z >> 31)


@lru_cache(maxsize=8192)
def derive_fill_pattern(secret: bytes) -> bytes:
    """8-byte poison pattern from the first 8 secret bytes.

    The seed is the little-endian value of the secret's first 8 bytes
    (zero-padded), advanced one SplitMix64 step; an all-zero result falls back
    to a fixed non-zero pattern so poisoning never degenerates to zeros.
    """
    seed = int.from_bytes(secret[:8].ljust(8, b"\x00"), "little")
    _, value = splitmix64_next(seed)
    pattern = value.to_bytes(8, "little")
    if pattern == b"\x00" * 8:
        return FALLBACK_PATTERN
    return pattern


@lru_cache(maxsize=256)
def _fill_row(pattern: bytes, size: int) -> bytes:
    return (pattern * (size // len(pattern) + 1))[:size]


class MemoryArena:
    """Fixed-size scratch buffer handed to in-process targets.

    Reset before every execution: each cell holds the fill pattern repeated
    (pattern[i % 8]) when poisoning is on, zero otherwise.
    """

    __slots__ = ("size", "cells")

    def __init__(self, size: int = DEFAULT_ARENA_SIZE) -> None:
        if size <= 0:
            raise ValueError("arena size must be positive")
        self.size = size
        self.cells = bytearray(size)

    def reset(self, pattern: bytes | None) -> None:
        """Refill every cell; ``None`` means zeros (poisoning disabled)."""
        if pattern is None:
            self.cells[:] = bytes(self.size)
        else:
            self.cells[:] = _fill_row(pattern, self.size)


class ExecStatus(Enum):
    OK = "ok"
    CRASH = "crash"
    TIMEOUT = "timeout"


@dataclass
class ExecutionResult:
    """Outcome of one target run; ``output`` is None unless status is OK."""

    status: ExecStatus
    output: bytes | None
    coverage: CoverageMap


# In-process target: (public, secret, arena, record_edge) -> output bytes.
TargetFn = Callable[[bytes, bytes, "MemoryArena", Callable[[int], None]], bytes]


class Executor(Protocol):
    total_executions: int

    def execute(self, inp: HyperInput, collect_coverage: bool = True) -> ExecutionResult: ...


def _noop_edge(_edge: int) -> None:
    return None


_EMPTY_COVERAGE = CoverageMap()


class InProcessExecutor:
    """Runs a Python target function directly; fast path for built-in targets.

    Timeouts are detected after the fact (the target is not preempted), which
    is sufficient for the cooperative built-in corpus.
    """

    def __init__(
        self,
        target: TargetFn,
        *,
        arena_size: int = DEFAULT_ARENA_SIZE,
        mem_fill: bool = True,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
    ) -> None:
        self._target = target
        self._arena = MemoryArena(arena_size)
        self.mem_fill = mem_fill
        self.timeout_ms = timeout_ms
        self.total_executions = 0

    def execute(self, inp: HyperInput, collect_coverage: bool = True) -> ExecutionResult:
        self.total_executions += 1
        pattern = derive_fill_pattern(inp.secret) if self.mem_fill else None
        self._arena.reset(pattern)
        if collect_coverage:
            coverage = CoverageMap()
            record = coverage.record
        else:
            coverage = _EMPTY_COVERAGE
            record = _noop_edge
        start = time.perf_counter()
        try:
            output = self._target(inp.public, inp.secret, self._arena, record)
        except Exception:
            return ExecutionResult(ExecStatus.CRASH, None, coverage)
        elapsed_ms = (time.perf_counter() - start) * 1000.0
        if elapsed_ms > self.timeout_ms:
            return ExecutionResult(ExecStatus.TIMEOUT, None, coverage)
        if not isinstance(output, (bytes, bytearray)):
            return ExecutionResult(ExecStatus.CRASH, None, coverage)
        return ExecutionResult(ExecStatus.OK, bytes(output), coverage)


_shm_seq = 0


class ExternalExecutor:
    """Runs a harness binary per input over the wire protocol.

    Contract: encoded input on stdin, public output on stdout, exit 0 for OK.
    A 65536-byte shared-memory region is created and its name exported as
    HYPERFUZZ_SHM_ID so instrumented harnesses can report edge counters;
    HYPERFUZZ_NO_FILL=1 is exported when poisoning is disabled.
    """

    def __init__(
        self,
        path: str,
        *,
        mem_fill: bool = True,
        timeout_ms: int = DEFAULT_TIMEOUT_MS,
    ) -> None:
        self.path = path
        self.mem_fill = mem_fill
        self.timeout_ms = timeout_ms
        self.total_executions = 0
        self._shm_name: str | None = None
        self._shm_path: str | None = None
        self._shm: mmap.mmap | None = None
        self._env = dict(os.environ)
        if not mem_fill:
            self._env[NO_FILL_ENV] = "1"
        else:
            self._env.pop(NO_FILL_ENV, None)
        self._open_shm()

    def _open_shm(self) -> None:
        global _shm_seq
        if not os.path.isdir(SHM_DIR):
            return
        _shm_seq += 1
        name = f"hyperfuzz-{os.getpid()}-{_shm_seq}"
        path = os.path.join(SHM_DIR, name)
        fd = os.open(path, os.O_CREAT | os.O_EXCL | os.O_RDWR, 0o600)
        try:
            os.ftruncate(fd, MAP_SIZE)
            self._shm = mmap.mmap(fd, MAP_SIZE)
        finally:
            os.close(fd)
        self._shm_name = name
        self._shm_path = path
        self._env[SHM_ENV] = name

    def close(self) -> None:
        if self._shm is not None:
            self._shm.close()
            self._shm = None
        if self._shm_path is not None:
            try:
                os.unlink(self._shm_path)
            except OSError:
                pass
            self._shm_path = None

    def __enter__(self) -> "ExternalExecutor":
        return self

    def __exit__(self, *_exc: object) -> None:
        self.close()

    def __del__(self) -> None:
        self.close()

    def execute(self, inp: HyperInput, collect_coverage: bool = True) -> ExecutionResult:
        self.total_executions += 1
        shm = self._shm
        if collect_coverage and shm is not None:
            shm[:] = bytes(MAP_SIZE)
        try:
            proc = subprocess.run(
                [self.path],
                input=encode(inp),
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                env=self._env,
                timeout=self.timeout_ms / 1000.0,
            )
        except subprocess.TimeoutExpired:
            return ExecutionResult(ExecStatus.TIMEOUT, None, _EMPTY_COVERAGE)
        if collect_coverage and shm is not None:
            coverage = CoverageMap.from_raw(shm[:])
        else:
            coverage = _EMPTY_COVERAGE
        if proc.returncode != 0:
            return ExecutionResult(ExecStatus.CRASH, None, coverage)
        return ExecutionResult(ExecStatus.OK, proc.stdout, coverage)
