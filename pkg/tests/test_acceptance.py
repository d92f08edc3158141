"""One test per acceptance criterion, each at its stated tolerance.

Every check prints a single ``[PASS]``/``[FAIL]`` line; the lines are also
repeated in the pytest terminal summary.
"""
import pytest

from dimlab import acceptance

ACCEPTANCE_LINES = []


@pytest.mark.parametrize("check", acceptance.CHECKS, ids=lambda c: c.__name__.removeprefix("check_"))
def test_criterion(check):
    res = check()
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append((res.number, line))
    assert res.passed, line
