import random

import pytest

from sftorbit.corpus import example2, example_pair
from sftorbit.sft import eventually_periodic_points, validate_sft


@pytest.fixture(scope="session")
def ex2():
    return example2()


@pytest.fixture(scope="session")
def full2():
    return validate_sft(((1, 1), (1, 1)), ["α", "β"])


@pytest.fixture(scope="session")
def golden():
    return example_pair(1)[1]


@pytest.fixture
def rng():
    return random.Random(20240607)


def sample_points(s, rng, count, max_transient=3, max_cycle=4):
    pts = eventually_periodic_points(s, max_transient, max_cycle)
    return rng.sample(pts, min(count, len(pts)))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for n in sorted(REPORT):
            terminalreporter.write_line(REPORT[n])
