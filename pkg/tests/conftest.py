import numpy as np
import pytest

from tau2 import ModelConfig
from tau2 import scalar_functions as sf
from tau2 import spectrum as sp


@pytest.fixture(scope="session")
def cfg1():
    return ModelConfig.random(1, 3, 1)


@pytest.fixture(scope="session")
def cfg2():
    return ModelConfig.random(2, 3, 2)


@pytest.fixture(scope="session")
def curves1(cfg1):
    return sp.eigencurves(cfg1)


@pytest.fixture(scope="session")
def curves2(cfg2):
    return sp.eigencurves(cfg2)


@pytest.fixture(scope="session")
def F1(cfg1):
    return sf.F_coeffs(cfg1)


@pytest.fixture(scope="session")
def F2(cfg2):
    return sf.F_coeffs(cfg2)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
