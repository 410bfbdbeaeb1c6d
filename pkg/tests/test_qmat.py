import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entwit.qmat import (
    PAULI, DensityMatrix, EigenError, HermitianMatrix, eig, eigvals, identity, kron,
    kron_all, negative_eigenvalue_sum, partial_transpose, trace_inner, trace_norm,
    trace_norm_negativity,
)

from conftest import random_density


def random_hermitian(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_symmetrizes_tiny_asymmetry():
    a = np.array([[1.0, 2.0], [2.0 + 1e-14, 3.0]])
    m = HermitianMatrix(a)
    assert np.allclose(m.data, m.data.conj().T, atol=0)
    assert m.dims == (2,)


def test_rejects_non_hermitian():
    with pytest.raises(ValueError):
        HermitianMatrix(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_rejects_bad_dims_and_oversize():
    with pytest.raises(ValueError):
        HermitianMatrix(np.eye(4), (2, 3))
    with pytest.raises(ValueError):
        HermitianMatrix(np.eye(17))


def test_immutable():
    m = HermitianMatrix(np.eye(2))
    with pytest.raises(ValueError):
        m.data[0, 0] = 5


def test_density_matrix_checks():
    with pytest.raises(ValueError):
        DensityMatrix(np.eye(2))
    with pytest.raises(ValueError):
        DensityMatrix(np.diag([1.5, -0.5]))
    rho = DensityMatrix.from_ket([1, 1j], (2,))
    assert np.isclose(rho.trace(), 1)


def test_arithmetic():
    a = HermitianMatrix(PAULI["X"])
    b = HermitianMatrix(PAULI["Z"])
    c = (a + b) * 0.5 - b
    assert np.allclose(c.data, (PAULI["X"] - PAULI["Z"]) / 2)


def test_json_round_trip():
    m = HermitianMatrix(np.kron(PAULI["Y"], PAULI["X"]), (2, 2))
    d = json.loads(m.to_json())
    assert set(d) == {"dims", "re", "im"}
    back = HermitianMatrix.from_json(m.to_json())
    assert back.dims == (2, 2)
    assert np.array_equal(back.data, m.data)


def test_kron_dims():
    z = HermitianMatrix(PAULI["Z"], (2,))
    m = kron_all([z, identity((3,)), z])
    assert m.dims == (2, 3, 2)
    assert m.side == 12
    assert np.allclose(kron(z, z).data, np.diag([1, -1, -1, 1]))


def test_partial_transpose_known_pattern():
    # same fixed pattern as the usual index-permutation check
    data = np.arange(16).reshape(4, 4).astype(float)
    sym = data + data.T
    m = HermitianMatrix(sym, (2, 2))
    t = sym.reshape(2, 2, 2, 2)
    expect_a = t.transpose(2, 1, 0, 3).reshape(4, 4)
    expect_b = t.transpose(0, 3, 2, 1).reshape(4, 4)
    assert np.array_equal(partial_transpose(m, 0).data, expect_a)
    assert np.array_equal(partial_transpose(m, 1).data, expect_b)
    with pytest.raises(IndexError):
        partial_transpose(m, 2)


def test_partial_transpose_involution(rng):
    m = HermitianMatrix(random_hermitian(6, rng), (2, 3))
    for k in (0, 1):
        twice = partial_transpose(partial_transpose(m, k), k)
        assert np.array_equal(twice.data, m.data)


def test_partial_transpose_of_product_is_product(rng):
    a = random_density(2, rng)
    b = random_density(3, rng)
    m = HermitianMatrix(np.kron(a, b), (2, 3))
    assert np.allclose(partial_transpose(m, 0).data, np.kron(a.T, b))


def test_trace_inner_matches_trace(rng):
    a = HermitianMatrix(random_hermitian(4, rng))
    b = HermitianMatrix(random_hermitian(4, rng))
    assert np.isclose(trace_inner(a, b), np.trace(a.data @ b.data).real)
    with pytest.raises(ValueError):
        trace_inner(a, HermitianMatrix(np.eye(2)))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 6, 8, 16])
def test_jacobi_against_lapack(n, rng):
    a = random_hermitian(n, rng)
    sp = eig(HermitianMatrix(a))
    assert np.allclose(sp.eigenvalues, np.linalg.eigvalsh(a), atol=1e-10)
    assert np.allclose(sp.reconstruct(), a, atol=1e-10)
    v = sp.eigenvectors
    assert np.allclose(v.conj().T @ v, np.eye(n), atol=1e-10)
    assert np.all(np.diff(sp.eigenvalues) >= 0)


def test_jacobi_degenerate_and_diagonal():
    sp = eig(HermitianMatrix(np.diag([3.0, 1.0, 1.0, 2.0])))
    assert np.array_equal(sp.eigenvalues, [1.0, 1.0, 2.0, 3.0])
    assert sp.sweeps == 0
    lam = eigvals(HermitianMatrix(np.ones((4, 4))))
    assert np.allclose(lam, [0, 0, 0, 4], atol=1e-12)


def test_jacobi_sweep_cap(rng):
    a = HermitianMatrix(random_hermitian(8, rng))
    with pytest.raises(EigenError):
        eig(a, max_sweeps=1)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_jacobi_property(n, seed):
    a = random_hermitian(n, np.random.default_rng(seed))
    sp = eig(HermitianMatrix(a))
    assert np.allclose(sp.reconstruct(), a, atol=1e-9)
    assert np.isclose(sp.eigenvalues.sum(), np.trace(a).real)


def test_negativity_helpers():
    m = HermitianMatrix(np.diag([0.75, 0.5, -0.25]))
    assert negative_eigenvalue_sum(m) == pytest.approx(0.25)
    assert trace_norm(m) == pytest.approx(1.5)
    assert trace_norm_negativity(m) == pytest.approx(0.5)
