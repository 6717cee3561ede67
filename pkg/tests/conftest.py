import numpy as np
import pytest

from lisout.config import SystemConfig
from lisout.scenario import Scenario


@pytest.fixture(scope="session")
def small_config():
    # 3 x 3 devices, 16 antennas each; cheap but with real interference
    return SystemConfig(antennas=16, spacing=1.0, region_x=(-1.0, 1.0), region_y=(0.0, 2.0), trials=200, paths=4)


@pytest.fixture(scope="session")
def small_scenario(small_config):
    return Scenario(small_config)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def report():
    """Record one acceptance line; all lines are repeated in the terminal summary."""

    def add(line: str) -> None:
        ACCEPTANCE_LINES.append(line)
        print(line)

    return add


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
