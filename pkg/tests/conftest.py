import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from homfrac.funcspace import Box, sample, zoo

settings.register_profile("homfrac", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("homfrac")


@pytest.fixture(scope="session")
def box64():
    return Box.cube(2, 2.0, 64)


@pytest.fixture(scope="session")
def box256():
    return Box.cube(2, 2.0, 256)


@pytest.fixture(scope="session")
def zoo64(box64):
    return zoo(box64)


@pytest.fixture(scope="session")
def unit_indicator256(box256):
    return sample("ball_indicator", box256, radius=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
