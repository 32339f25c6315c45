import numpy as np
import pytest


def complex_vector(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def unit_vector(rng, n):
    v = complex_vector(rng, n)
    return v / np.linalg.norm(v)


def basis(n, k):
    e = np.zeros(n, dtype=complex)
    e[k] = 1.0
    return e


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)
