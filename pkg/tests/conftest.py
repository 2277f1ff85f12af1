import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from effectus_lab.rng import Xoshiro256

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return Xoshiro256(20240601)


def random_hermitian(n, rng):
    g = rng.ginibre(n, n)
    return (g + g.conj().T) / 2


def random_psd(n, rng, rank=None):
    g = rng.ginibre(n, rank or n)
    return g @ g.conj().T
