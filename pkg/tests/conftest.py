import numpy as np
import pytest
from hypothesis import settings

from phasetunnel.grid import make_grid

settings.register_profile("suite", deadline=None, max_examples=25)
settings.load_profile("suite")

REPO_SEED = 1234


@pytest.fixture
def grid64():
    return make_grid(-8.0, 8.0, 64, n_p=128)


@pytest.fixture
def grid128():
    return make_grid(-10.0, 10.0, 128, n_p=256)


@pytest.fixture
def grid256():
    return make_grid(-12.0, 12.0, 256, n_p=512)


@pytest.fixture
def rng():
    return np.random.default_rng(REPO_SEED)
