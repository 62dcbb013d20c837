import numpy as np
import pytest

from cllsr.aqp import SolverConfig, solve
from cllsr.data import preprocess, synthesize_dataset

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def synthetic():
    """The seeded reference dataset: 3 clusters x 50 samples, 3 views, noise 0.01."""
    return preprocess(synthesize_dataset(3, 50, 3, 0.01, 7))


@pytest.fixture(scope="session")
def solved(synthetic):
    state, trace = solve(synthetic, SolverConfig(max_outer=15))
    return state, trace


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
