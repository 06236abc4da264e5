import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from macfusion.model import NetworkConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def b1():
    """Two identical unit sensors."""
    return NetworkConfig.symmetric(2)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def random_two_sensor(rng, spread=1.0):
    g = 10 ** rng.uniform(-spread, spread, 2)
    n = 10 ** rng.uniform(-spread, spread, 2)
    return NetworkConfig(1.0, 1.0, tuple(g), tuple(n))
