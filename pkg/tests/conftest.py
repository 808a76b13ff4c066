import math

import numpy as np
import pytest

from dilute_fermi.fock import ModeSet
from dilute_fermi.lattice import fermi_ball
from dilute_fermi.potential import FourierPotential, RadialPotential

TWO_PI = 2.0 * math.pi


@pytest.fixture(scope="session")
def bump():
    return RadialPotential("bump", 1.0, 1.0)


@pytest.fixture(scope="session")
def bump_hat(bump):
    return FourierPotential(bump, 1e-12)


def small_modes(extra_up=((1, 0, 0), (0, 1, 0), (0, 0, 1)), extra_down=((-1, 0, 0), (0, -1, 0), (0, 0, -1)), N=1, L=TWO_PI):
    return ModeSet.from_balls(fermi_ball(L, N, "up"), fermi_ball(L, N, "down"), extra_up, extra_down)


@pytest.fixture(scope="session")
def modes8():
    """One particle per spin plus three extra momenta per spin."""
    return small_modes()


@pytest.fixture(scope="session")
def modes16():
    """Seven particles per spin plus one extra momentum per spin."""
    return small_modes(((1, 1, 0),), ((-1, -1, 0),), N=7)


@pytest.fixture
def rng():
    return np.random.default_rng(20261018)


ACCEPTANCE_LINES: dict[int, str] = {}


def record(number: int, name: str, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] #{number:>2} {name}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
