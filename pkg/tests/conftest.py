"""Shared fixtures: the reference construction runs once per session."""

import time

import pytest

from badline import LogOmega, run_trace
from badline.vectors import IVec3

REFERENCE_SEED = (IVec3(1, 0, 0), IVec3(1, 1, 0))

_acceptance: dict[str, tuple[bool, str]] = {}


def record_acceptance(name: str, ok: bool, detail: str = "") -> None:
    """Criteria registered here are echoed after the run, one line each."""
    _acceptance[name] = (ok, detail)


@pytest.fixture(scope="session")
def acceptance():
    """The recorder function, handed out so the summary hook sees the entries."""
    return record_acceptance


@pytest.fixture(scope="session")
def reference_build() -> tuple:
    """The 10-step reference run together with its wall-clock build time."""
    start = time.monotonic()
    trace = run_trace(REFERENCE_SEED, LogOmega(), 10, forbidden_bound=10)
    return trace, time.monotonic() - start


@pytest.fixture(scope="session")
def trace10(reference_build):
    return reference_build[0]


@pytest.fixture(scope="session")
def trace5():
    """Shorter run for tests that want exact values at human scale."""
    return run_trace(REFERENCE_SEED, LogOmega(), 5, forbidden_bound=10)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        ok, detail = _acceptance[name]
        line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}"
        if detail:
            line = f"{line} ({detail})"
        terminalreporter.write_line(line)
