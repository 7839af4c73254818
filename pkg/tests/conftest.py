import numpy as np
import pytest

from vaporpair import atomic, biphoton

TEMP_DEFAULT = 325.15  # K, the 52 C operating point


@pytest.fixture(scope="session")
def system():
    return atomic.LadderSystem()


@pytest.fixture(scope="session")
def fields():
    return atomic.FieldParams(rabi_pump=2 * np.pi * 5e6,
                              rabi_coupling=2 * np.pi * 20e6)


@pytest.fixture(scope="session")
def vgrid(system):
    return atomic.make_velocity_grid(TEMP_DEFAULT, system.atom_mass)


@pytest.fixture(scope="session")
def tgrid():
    # 10 ps steps, +-20.48 ns: wide enough that the envelope decays to
    # numerical zero at the ends
    return biphoton.symmetric_grid(10e-12, 4096)
