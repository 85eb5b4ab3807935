import numpy as np
import pytest
from hypothesis import settings

from shiftmourre.grid import make_grid

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def grid1():
    return make_grid(1, 8.0, 128, 1.0)


@pytest.fixture
def grid2():
    return make_grid(2, 4.0, 32, 1.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
