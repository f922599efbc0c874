import numpy as np
import pytest

from renyiflow import balance_check as bc
from renyiflow import generator as gen


@pytest.fixture(scope="session")
def qubit_xz():
    return gen.qubit_xz_generator()


@pytest.fixture(scope="session")
def depol():
    sigma = np.diag([0.3, 0.7]).astype(complex)
    return gen.depolarizing_generator(0.7, sigma)


@pytest.fixture(scope="session")
def counterexample():
    return bc.carlen_maas_counterexample()


@pytest.fixture(scope="session")
def cm_sigma():
    return np.array([[2.0, 3.0], [3.0, 5.0]], dtype=complex) / 7.0


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
