import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hkhitchin.hitchin import perturbed_fixture, solve  # noqa: E402
from hkhitchin.lattice import Grid  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def solved_reference():
    """The reference solve: perturbed diagonal fixture, seed 3, N = 16."""
    c0 = perturbed_fixture(Grid(16), seed=3)
    c, trace = solve(c0, max_iters=5000, tol=1e-12)
    return c0, c, trace


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line[1])
