import pytest

from bathforge import renorm
from bathforge.renorm import Resonator

K_BAND = (-3.35, -2.30, -1.75, -1.25)


@pytest.fixture(scope="session")
def q_spec():
    """The paper-regime bath: k = -2.30, reduced units, J(W) set by Q = 215."""
    return renorm.calibrate_from_quality(-2.30, 1.0, 215.0)


@pytest.fixture(scope="session")
def res_cold():
    return Resonator.anchored(mass=1.0, omega_r=1.0, temperature=0.0)


@pytest.fixture(scope="session")
def res_warm():
    """k_B T = 100 W: deep high-temperature regime but still finite."""
    return Resonator.anchored(mass=1.0, omega_r=1.0, temperature=100.0)
