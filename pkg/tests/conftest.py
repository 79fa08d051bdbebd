import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_complex(gen, n, radius=1.0):
    """Uniform complex samples in the disk of the given radius."""
    r = radius * np.sqrt(gen.uniform(size=n))
    theta = 2.0 * np.pi * gen.uniform(size=n)
    return r * np.exp(1j * theta)
