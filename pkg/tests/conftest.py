import numpy as np
import pytest

from gesturegan.poses import JointLimits


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def limits():
    return JointLimits.default()


@pytest.fixture(scope="session")
def wide_limits():
    """Limits wide enough that no kinematic output is clamped."""
    return JointLimits.default().with_(lower=[-10.0] * 14, upper=[10.0] * 14)


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
