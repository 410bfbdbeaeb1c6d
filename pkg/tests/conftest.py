import numpy as np
import pytest


def random_density(d, rng, rank=None):
    rank = rank or d
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_product(dims, rng):
    """Random pure product state as a dense array."""
    kets = []
    for d in dims:
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        kets.append(v / np.linalg.norm(v))
    psi = kets[0]
    for v in kets[1:]:
        psi = np.kron(psi, v)
    return np.outer(psi, psi.conj())


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
