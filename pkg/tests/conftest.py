import numpy as np
import pytest

from posturemap.babble import BabbleConfig, generate_babble
from posturemap.dataset import JointSpec


@pytest.fixture(scope="session")
def babble_60s():
    """One shared minute of babbling; generation is deterministic."""
    return generate_babble(BabbleConfig(seed=42, duration_s=60.0))


@pytest.fixture(scope="session")
def babble_short():
    """A few seconds of babbling for cheap pipeline tests."""
    return generate_babble(BabbleConfig(seed=7, duration_s=5.0))


@pytest.fixture
def demo_joint():
    return JointSpec("demo_joint", -40.0, 30.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
