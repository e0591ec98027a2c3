import pytest

from neighborwalk.graph import generate_dba
from neighborwalk.oracle import g3 as make_g3

ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []

# dense ids of the running example's original nodes 1, 2, 3
N1, N2, N3 = 0, 1, 2


@pytest.fixture
def g3():
    return make_g3()


@pytest.fixture(scope="session")
def dba_small():
    return generate_dba(500, 3, 1.0, seed=11)


@pytest.fixture(scope="session")
def dba_10k():
    return generate_dba(10_000, 10, 1.0, seed=0)


@pytest.fixture
def criterion():
    """Record one acceptance criterion's outcome for the end-of-run summary."""

    def record(name: str, passed: bool, detail: str = "") -> None:
        ACCEPTANCE_RESULTS.append((name, bool(passed), detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
