import pytest

from metfatigue.analysis import EvaluationGrid, analyze_catalog
from metfatigue.catalog import reference_catalog
from metfatigue.report import load_golden

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def catalog():
    return reference_catalog()


@pytest.fixture(scope="session")
def grid():
    return EvaluationGrid()


@pytest.fixture(scope="session")
def results(catalog, grid):
    return {r.model_id: r for r in analyze_catalog(catalog, grid)}


@pytest.fixture(scope="session")
def golden():
    return load_golden()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
