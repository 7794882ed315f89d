"""Build fixture and acceptance reporting for the native leak targets."""

from __future__ import annotations

import subprocess
from pathlib import Path

import pytest

NATIVE_ROOT = Path(__file__).resolve().parent.parent

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
def native_binaries() -> dict[str, Path]:
    """Compile both targets; every test runs against a fresh build."""
    proc = subprocess.run(
        ["make", "-C", str(NATIVE_ROOT)], capture_output=True, text=True
    )
    if proc.returncode != 0:
        pytest.fail(f"native build failed:\n{proc.stdout}\n{proc.stderr}")
    binaries = {
        "padding": NATIVE_ROOT / "bin" / "padding_leak",
        "overread": NATIVE_ROOT / "bin" / "overread_leak",
    }
    for path in binaries.values():
        assert path.is_file(), f"missing binary {path}"
    return binaries
