import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from kronecker.params import ExperimentConfig

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def config2():
    return ExperimentConfig(d=2, side_ranges=((0.1, 0.4), (0.1, 0.4)), eta=0.05,
                            epsilon=0.5, delta=0.2, seed=11)


@pytest.fixture
def config1():
    return ExperimentConfig(d=1, side_ranges=((0.1, 0.4),), eta=0.0, epsilon=0.5,
                            delta=0.2, seed=5)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
