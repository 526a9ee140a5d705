import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def star():
    from shapetaylor.geometry import ClosedCurve
    return ClosedCurve.star(1.0, [0.0, 0.0, 0.1])


@pytest.fixture(scope="session")
def ring():
    th = np.linspace(0, 2 * np.pi, 8, endpoint=False)
    return 3.0 * np.c_[np.cos(th), np.sin(th)]


_LINES = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects PASS/FAIL lines of the acceptance tests for the terminal summary."""
    return request.config.stash.setdefault(_LINES, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
