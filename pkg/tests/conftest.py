import math

import pytest
from hypothesis import settings

from dimlab.symbolic import BetaSystem

settings.register_profile("dimlab", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("dimlab")

LOG2 = math.log(2.0)
LOG_GOLDEN = math.log((1 + math.sqrt(5)) / 2)


@pytest.fixture(scope="session")
def doubling():
    return BetaSystem(2)


@pytest.fixture(scope="session")
def golden():
    return BetaSystem.golden()


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
