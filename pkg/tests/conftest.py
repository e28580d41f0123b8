import pytest

from findef.fixtures import load_fixture

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def L3():
    return load_fixture("L3")


@pytest.fixture(scope="session")
def K2():
    """The 2K2 fixture (two disjoint edges)."""
    return load_fixture("2K2")


@pytest.fixture(scope="session")
def C4():
    return load_fixture("C4")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
