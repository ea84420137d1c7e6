import numpy as np
import pytest

from solsqueeze import make_grid, mean_field
from solsqueeze.soliton import discrete_modes


@pytest.fixture(scope="session")
def grid128():
    return make_grid(128, 20.0)


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256, 20.0)


@pytest.fixture(scope="session")
def soliton256(grid256):
    return mean_field(grid256)


@pytest.fixture(scope="session")
def modes256(grid256):
    return discrete_modes(grid256)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260808)
