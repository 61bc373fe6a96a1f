import numpy as np
import pytest

from vlcpos.channel import ChannelParams
from vlcpos.geometry import SceneGeometry, led_grid


@pytest.fixture(scope="session")
def base_geom():
    return SceneGeometry(floor_side=50.0, ceiling_height=3.0, n_led_per_side=25, coverage_radius=4.0)


@pytest.fixture(scope="session")
def base_leds(base_geom):
    return led_grid(base_geom)


@pytest.fixture(scope="session")
def params():
    return ChannelParams()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def report(capsys):
    """Print one verdict line immediately and again in the session summary."""

    def _report(criterion: str, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] {criterion}: {detail}"
        ACCEPTANCE_LINES.append(line)
        with capsys.disabled():
            print("\n" + line)

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
