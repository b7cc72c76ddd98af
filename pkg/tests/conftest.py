import pytest

from tccsim.config import SimConfig

ACCEPTANCE_LINES = []


@pytest.fixture
def tiny():
    """L1 with a single one-way frame: every new block evicts the previous."""
    return SimConfig(l1_size=64, l1_ways=1, l2_size=1024, l2_ways=2)


@pytest.fixture
def small():
    return SimConfig(l1_size=1024, l1_ways=2, l2_size=8192, l2_ways=4)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
