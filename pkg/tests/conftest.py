"""Shared fixtures: the independent hash reference and acceptance reporting."""

from __future__ import annotations

import ctypes
import ctypes.util

import pytest

_CRITERION_LINES: list[str] = []


def record_criterion(line: str) -> None:
    """Collect one pass/fail line per acceptance criterion for the summary."""
    _CRITERION_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERION_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def xxh64_reference():
    """XXH64 from the system C library; the independent reference oracle."""
    path = ctypes.util.find_library("xxhash")
    if path is None:
        pytest.fail("system libxxhash not found; the hash conformance check needs it")
    lib = ctypes.CDLL(path)
    lib.XXH64.restype = ctypes.c_uint64
    lib.XXH64.argtypes = [ctypes.c_char_p, ctypes.c_size_t, ctypes.c_uint64]

    def reference(data: bytes, seed: int = 0) -> int:
        return lib.XXH64(data, len(data), seed)

    return reference
