import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_amps(rng, n):
    a = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
    return a / np.linalg.norm(a)
