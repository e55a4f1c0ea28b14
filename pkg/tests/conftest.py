import math

import pytest

from casimir_cavity import CavityGeometry, WallMotion

PI = math.pi


@pytest.fixture
def square():
    return CavityGeometry(Lx=PI, Ly=PI)


@pytest.fixture
def resonant_motion():
    """Omega = omega_(1,1) + omega_(2,1) in the pi x pi cavity, 100 drive periods."""
    Omega = math.sqrt(2.0) + math.sqrt(5.0)
    return WallMotion(epsilon=1e-3, Omega=Omega, duration_T=200 * PI / Omega)
