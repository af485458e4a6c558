import numpy as np
import pytest

from ridgexmse.checks import random_instance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def instance(rng):
    """(phi, Y, cache) for a small well-conditioned regression."""
    return random_instance(rng, 40, 4)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
