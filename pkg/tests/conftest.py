import numpy as np
import pytest
from hypothesis import settings as hypothesis_settings

hypothesis_settings.register_profile("wcosym", max_examples=30, deadline=None)
hypothesis_settings.load_profile("wcosym")


@pytest.fixture
def rng():
    return np.random.default_rng(0xB411)


@pytest.fixture
def swap():
    return np.array([[0, 1], [1, 0]], dtype=complex)


@pytest.fixture
def symmetric_s():
    return np.array([[0.3, 0.1], [0.1, 0.5]], dtype=complex)
