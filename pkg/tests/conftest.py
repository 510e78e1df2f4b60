import numpy as np
import pytest

from okdv.fields import Grid, random_smooth_field


@pytest.fixture(scope="session")
def grid64():
    return Grid(64, 20.0)


@pytest.fixture(scope="session")
def grid128():
    return Grid(128, 20.0)


@pytest.fixture(scope="session")
def grid256():
    return Grid(256, 40.0)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture()
def smooth_octonionic(grid128):
    return random_smooth_field(grid128, seed=42, mode_cutoff=5, amplitude=0.5)
