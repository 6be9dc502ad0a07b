import numpy as np
import pytest

from hfbikit.event_log import ActivityLog

ACCEPTANCE_LINES: list[str] = []


FILLER = 10**6


def log_from_attendance(att: dict, incentives=(), fill=False):
    """Build a log from ``{user: [activity ids]}``.

    With ``fill`` an extra user ``FILLER`` attends every activity nobody
    else attended, so sparse hand examples still form a contiguous log.
    """
    att = dict(att)
    if fill:
        seen = {x for acts in att.values() for x in acts}
        gaps = [x for x in range(max(seen) + 1) if x not in seen]
        if gaps:
            att[FILLER] = gaps
    p = [u for u, acts in att.items() for _ in acts]
    a = [x for acts in att.values() for x in acts]
    return ActivityLog(p, a, incentive_activities=incentives)


@pytest.fixture
def small_log():
    # u0 attends 0,1,2; u1 attends 2; u2 attends 1
    return log_from_attendance({0: [0, 1, 2], 1: [2], 2: [1]})


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
