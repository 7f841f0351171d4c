import time

import pytest

from nambulie.liealg import load
from nambulie.tables import DEFAULT_SEED, run_all


@pytest.fixture(scope="session")
def registry():
    return load()


@pytest.fixture(scope="session")
def full_report(registry):
    """One complete run of both tables with errata justification, plus its wall time."""
    t0 = time.perf_counter()
    rep = run_all(registry, seed=DEFAULT_SEED)
    return rep, time.perf_counter() - t0


_ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record one acceptance line: ``acceptance(criterion, ok, detail)``."""

    def record(criterion, ok, detail):
        _ACCEPTANCE[str(criterion)] = (bool(ok), detail)

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_ACCEPTANCE, key=lambda k: (not k.isdigit(), k)):
        ok, detail = _ACCEPTANCE[key]
        label = f"criterion {key}" if key.isdigit() else key
        terminalreporter.write_line(f"{label}: {'PASS' if ok else 'FAIL'}  {detail}")
