import mpmath as mp
import pytest

CRITERIA: dict = {}


@pytest.fixture(autouse=True)
def _precision():
    with mp.workdps(60):
        yield


@pytest.fixture
def record():
    """``record(n, ok, detail)`` stores the verdict of acceptance criterion ``n``."""

    def _record(n, ok, detail=""):
        CRITERIA[n] = (bool(ok), detail)
        print(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")

    return _record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
