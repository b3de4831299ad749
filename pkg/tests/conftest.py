import numpy as np
import pytest

from aybe.theta import TorusParam

TAUS = (1j, 2j, 0.3 + 1.7j)


@pytest.fixture
def tp():
    return TorusParam(1j)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def point_in_domain(rng, tau, margin=0.05):
    a, b = rng.uniform(margin, 1 - margin, size=2)
    return complex(a) + complex(b) * tau


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
