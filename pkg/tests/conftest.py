import numpy as np
import pytest

from ergmsize import terms as T

from helpers import random_attrs, random_network


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def attrs30(rng):
    return random_attrs(30, rng)


@pytest.fixture
def net30(rng):
    return random_network(30, 0.15, rng)


@pytest.fixture
def nhsls():
    return T.nhsls_model()
