import math
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from rpmtwpa.circuit import derive_device, solve_constraints  # noqa: E402
from rpmtwpa.dispersion import DispersionContext  # noqa: E402
from rpmtwpa.mixer import PumpConfig  # noqa: E402

IC = 2.75e-6
CJ = 39.5e-15
N_CELLS = 2000
Z0 = 50.0
IP = 1.37e-6
FP = 6e9
FR = 6.06e9
CC = 20e-15
CR = 11e-12

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def device():
    return derive_device(IC, CJ, N_CELLS, Z0)


@pytest.fixture(scope="session")
def pump():
    return PumpConfig(IP, FP, IC)


@pytest.fixture(scope="session")
def resonator(device):
    return solve_constraints(device, 2 * math.pi * FR, CC, CR)


@pytest.fixture(scope="session")
def ctx(device, resonator):
    return DispersionContext.from_physical(device, resonator)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
