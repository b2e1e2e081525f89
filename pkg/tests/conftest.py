import numpy as np
import pytest

from droplet_fall import analytic as an
from droplet_fall.core import make_grid

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def report(number: int, passed: bool, detail: str) -> None:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def figure_grid():
    return make_grid(4096, -80.0, 0.0488)


@pytest.fixture(scope="session")
def figure_params():
    # figure droplet: mu = mu0, |G1| = 1, G2 = 0.9999, full kinetic term
    return an.DropletParams.from_ratio(1.0, 1.0, 0.9999, "full")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
