import os

import pytest

# criterion lines collected by test_acceptance, printed after the run
CRITERION_LINES = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(params=[True, False], ids=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel backend."""
    from sausage import _accel

    if request.param and not _accel.HAVE_NUMBA:
        pytest.skip("numba not available")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param)
    return request.param


@pytest.fixture(autouse=True)
def _no_thread_env(monkeypatch):
    monkeypatch.delenv("SAUSAGE_THREADS", raising=False)
    yield
