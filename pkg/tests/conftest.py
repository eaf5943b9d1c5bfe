import numpy as np
import pytest

from nllab.linalg import hermitian_eig


def random_hermitian(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + m.conj().T) / 2.0


def random_unitary(rng, n):
    _, v = hermitian_eig(random_hermitian(rng, n))
    return v


def random_state_amps(rng, dim):
    return rng.standard_normal(dim) + 1j * rng.standard_normal(dim)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
