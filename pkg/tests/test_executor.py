"""Fill patterns, arena hermeticity, and both executor flavors."""

from __future__ import annotations

import os
import stat
import sys
import time

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfuzz.executor import (
    FALLBACK_PATTERN,
    ExecStatus,
    ExternalExecutor,
    InProcessExecutor,
    MemoryArena,
    derive_fill_pattern,
    splitmix64_next,
)
from hyperfuzz.model import HyperInput, encode

# Published SplitMix64 reference output for seed 0, frozen before coding.
SPLITMIX_SEED0_FIRST = 0xE220A8397B1DCDAF


def test_splitmix64_known_vector():
    state, out = splitmix64_next(0)
    assert out == SPLITMIX_SEED0_FIRST
    assert state == 0x9E3779B97F4A7C15


def test_splitmix64_state_advances_by_golden_gamma():
    state = 0xDEADBEEF
    new_state, _ = splitmix64_next(state)
    assert new_state == (state + 0x9E3779B97F4A7C15) % 2**64


def test_fill_pattern_empty_secret_equals_zero_seed():
    expected = SPLITMIX_SEED0_FIRST.to_bytes(8, "little")
    assert derive_fill_pattern(b"") == expected
    assert derive_fill_pattern(bytes(8)) == expected
    assert derive_fill_pattern(bytes(3)) == expected


def test_fill_pattern_uses_only_first_eight_bytes():
    assert derive_fill_pattern(b"ABCDEFGH") == derive_fill_pattern(b"ABCDEFGH-tail-ignored")
    assert derive_fill_pattern(b"\x01") != derive_fill_pattern(b"\x02")


def test_fill_pattern_deterministic():
    assert derive_fill_pattern(b"same") == derive_fill_pattern(b"same")


def test_fallback_pattern_is_nonzero():
    assert FALLBACK_PATTERN == b"\xa5" * 8


@given(st.binary(max_size=24))
def test_fill_pattern_never_all_zero(secret):
    assert derive_fill_pattern(secret) != bytes(8)


def test_arena_reset_pattern_layout():
    arena = MemoryArena(size=20)
    arena.reset(b"\x01\x02\x03\x04\x05\x06\x07\x08")
    assert bytes(arena.cells) == (b"\x01\x02\x03\x04\x05\x06\x07\x08" * 3)[:20]
    arena.reset(None)
    assert bytes(arena.cells) == bytes(20)


def test_arena_size_validated():
    with pytest.raises(ValueError):
        MemoryArena(size=0)


def _echo_public(public, secret, arena, cov):
    cov(1)
    return public


def test_in_process_ok():
    ex = InProcessExecutor(_echo_public)
    result = ex.execute(HyperInput(b"hello", b"x"))
    assert result.status is ExecStatus.OK
    assert result.output == b"hello"
    assert 1 in result.coverage.touched
    assert ex.total_executions == 1


def test_in_process_crash_on_exception():
    def boom(public, secret, arena, cov):
        raise RuntimeError("target fault")

    result = InProcessExecutor(boom).execute(HyperInput())
    assert result.status is ExecStatus.CRASH
    assert result.output is None


def test_in_process_crash_on_bad_return_type():
    result = InProcessExecutor(lambda p, s, a, c: "not-bytes").execute(HyperInput())
    assert result.status is ExecStatus.CRASH


def test_in_process_timeout():
    def slow(public, secret, arena, cov):
        time.sleep(0.05)
        return b""

    result = InProcessExecutor(slow, timeout_ms=10).execute(HyperInput())
    assert result.status is ExecStatus.TIMEOUT
    assert result.output is None


def test_in_process_arena_prefill_and_hermeticity():
    def read_arena(public, secret, arena, cov):
        head = bytes(arena.cells[:8])
        arena.cells[:8] = b"\xff" * 8  # scribble; must not leak into next run
        return head

    ex = InProcessExecutor(read_arena)
    inp = HyperInput(b"", b"seed")
    first = ex.execute(inp)
    second = ex.execute(inp)
    assert first.output == derive_fill_pattern(b"seed")
    assert second.output == first.output


def test_in_process_fill_disabled_zeroes_arena():
    def read_arena(public, secret, arena, cov):
        return bytes(arena.cells[:8])

    ex = InProcessExecutor(read_arena, mem_fill=False)
    assert ex.execute(HyperInput(b"", b"anything")).output == bytes(8)


def test_in_process_skip_coverage_collection():
    ex = InProcessExecutor(_echo_public)
    result = ex.execute(HyperInput(b"p", b"s"), collect_coverage=False)
    assert result.status is ExecStatus.OK
    assert result.coverage.touched == set()


def _write_script(tmp_path, name: str, body: str) -> str:
    path = tmp_path / name
    path.write_text(body)
    path.chmod(path.stat().st_mode | stat.S_IEXEC)
    return str(path)


def test_external_ok_and_crash_and_timeout(tmp_path):
    echo = _write_script(tmp_path, "echo.sh", "#!/bin/sh\ncat\n")
    crash = _write_script(tmp_path, "crash.sh", "#!/bin/sh\nexit 3\n")
    sleepy = _write_script(tmp_path, "sleepy.sh", "#!/bin/sh\nsleep 5\n")

    inp = HyperInput(b"\xaa", b"\xbb")
    with ExternalExecutor(echo) as ex:
        result = ex.execute(inp)
        assert result.status is ExecStatus.OK
        assert result.output == encode(inp)
    with ExternalExecutor(crash) as ex:
        assert ex.execute(inp).status is ExecStatus.CRASH
    with ExternalExecutor(sleepy, timeout_ms=200) as ex:
        assert ex.execute(inp).status is ExecStatus.TIMEOUT


def test_external_no_fill_env(tmp_path):
    probe = _write_script(
        tmp_path, "probe.sh", '#!/bin/sh\nprintf "%s" "${HYPERFUZZ_NO_FILL:-unset}"\n'
    )
    with ExternalExecutor(probe, mem_fill=False) as ex:
        assert ex.execute(HyperInput()).output == b"1"
    with ExternalExecutor(probe, mem_fill=True) as ex:
        assert ex.execute(HyperInput()).output == b"unset"


@pytest.mark.skipif(not os.path.isdir("/dev/shm"), reason="no /dev/shm on this host")
def test_external_shared_memory_coverage(tmp_path):
    harness = _write_script(
        tmp_path,
        "cov.py",
        f"#!{sys.executable}\n"
        "import os, sys\n"
        "sys.stdin.buffer.read()\n"
        "name = os.environ['HYPERFUZZ_SHM_ID']\n"
        "with open(os.path.join('/dev/shm', name), 'r+b') as fh:\n"
        "    fh.seek(123)\n"
        "    fh.write(bytes([7]))\n"
        "sys.stdout.buffer.write(b'ok')\n",
    )
    with ExternalExecutor(harness) as ex:
        result = ex.execute(HyperInput(b"p", b"s"))
        assert result.status is ExecStatus.OK
        assert result.output == b"ok"
        assert result.coverage.counts[123] == 7
        assert 123 in result.coverage.touched
        # Map must be zeroed between runs, not accumulated.
        again = ex.execute(HyperInput(b"p", b"s"))
        assert again.coverage.counts[123] == 7
