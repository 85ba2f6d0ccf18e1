from pathlib import Path

import pytest

from cwtss.cwexpr import parse_expr
from cwtss.formats import read_tss

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def example_graph():
    """The 11-vertex example graph with its thresholds (t_max = 2)."""
    return read_tss(FIXTURES / "example1.tss")


@pytest.fixture
def example_expr():
    return parse_expr((FIXTURES / "example1.cwe").read_text())


@pytest.fixture
def identity_sigma():
    return {v: v for v in range(1, 12)}


# acceptance criteria record their verdicts here; printed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
