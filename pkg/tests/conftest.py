from __future__ import annotations

import time
from contextlib import contextmanager

import pytest

_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Time a block against its budget and record one PASS/FAIL line for the summary."""

    @contextmanager
    def run(number: int, title: str, budget: float):
        start = time.perf_counter()
        try:
            yield
        except BaseException:
            elapsed = time.perf_counter() - start
            _CRITERIA[number] = f"FAIL criterion {number}: {title} ({elapsed:.2f}s)"
            print(_CRITERIA[number])
            raise
        elapsed = time.perf_counter() - start
        ok = elapsed < budget
        verdict = "PASS" if ok else "FAIL"
        _CRITERIA[number] = f"{verdict} criterion {number}: {title} ({elapsed:.2f}s, budget {budget:g}s)"
        print(_CRITERIA[number])
        assert ok, f"took {elapsed:.2f}s, budget {budget}s"

    return run


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[n])
