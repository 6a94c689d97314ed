import numpy as np
import pytest

from pointvortex.surfaces import Surface


@pytest.fixture
def sphere():
    return Surface.sphere()


@pytest.fixture
def torus_i():
    return Surface.flat_torus(1j)


@pytest.fixture
def torus_skew():
    return Surface.flat_torus(0.5 + 1j)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
