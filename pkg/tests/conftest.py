import numpy as np
import pytest

from fbplearn import GridSpec, ScanGeometry, default_geometry


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid16():
    return GridSpec(16)


@pytest.fixture
def geom16(grid16):
    return default_geometry(grid16, num_angles=12)


@pytest.fixture
def grid8():
    return GridSpec(8)


@pytest.fixture
def geom8(grid8):
    return default_geometry(grid8, num_angles=8)
