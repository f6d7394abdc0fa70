import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from cliffcauchy.algebra import algebra
from cliffcauchy.boundary import SurfaceDomain

settings.register_profile("ci", deadline=None, max_examples=30,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def alg4():
    return algebra(4)


@pytest.fixture
def unit4():
    return SurfaceDomain.unit(4)


def random_mv(rng, m, shape=()):
    size = 1 << m
    return rng.normal(size=shape + (size,)) + 1j * rng.normal(size=shape + (size,))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
