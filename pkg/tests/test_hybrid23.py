import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entwit import hybrid23 as h
from entwit.qmat import HermitianMatrix
from entwit.states import negativity

from conftest import random_product


def test_gell_mann_basis():
    lam = h.gell_mann()
    assert lam.shape == (8, 3, 3)
    gram = np.einsum("iab,jba->ij", lam, lam).real
    assert np.allclose(gram, 2 * np.eye(8))
    assert np.allclose(np.trace(lam, axis1=1, axis2=2), 0)


def test_bloch_labels():
    labels = h.bloch_labels()
    assert len(labels) == 35
    assert labels[:3] == ["u1", "u2", "u3"]
    assert labels[3] == "v1" and labels[10] == "v8"
    assert labels[11] == "b11" and labels[-1] == "b38"


def test_bloch_round_trip(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    m = HermitianMatrix((a + a.conj().T) / 2, h.DIMS)
    assert np.allclose(h.bloch_decompose(m).reconstruct().data, m.data, atol=1e-12)


def test_witness_sparsity_and_values():
    w = h.derive_witness()
    co = h.bloch_decompose(w)
    assert co.t == pytest.approx(1.0)
    assert h.support(w) == [10, 11, 20, 29]
    flat = co.flat
    assert flat[10] == pytest.approx(0.5)
    assert flat[[11, 20, 29]] == pytest.approx([1.5, 1.5, 1.5])


def test_derived_witness_entries():
    w = h.derive_witness().data
    expect = np.zeros((6, 6))
    expect[0, 0] = expect[4, 4] = expect[1, 3] = expect[3, 1] = 0.5
    assert np.allclose(w, expect, atol=1e-12)
    printed = h.printed_witness().data
    assert printed[5, 5] == 0.5 and printed[4, 4] == 0


def test_family_constraints():
    with pytest.raises(ValueError):
        h.TwoParamState(0.6, 0.1)
    s = h.TwoParamState(0.4, 0.5)
    assert not s.physical
    with pytest.raises(ValueError):
        h.assemble(s)
    assert h.family_operator(s).trace() == pytest.approx(1.0)
    rho = h.assemble(h.TwoParamState(0.1, 0.3))
    assert rho.trace() == pytest.approx(1.0)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 1))
def test_spectrum_property(a, g):
    s = h.TwoParamState(a, g)
    assert np.allclose(h.pt_spectrum(s), h.pt_spectrum_closed_form(s), atol=1e-10)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 0.5), st.floats(0, 1))
def test_witness_trace_plane(a, g):
    s = h.TwoParamState(a, g)
    val = np.trace(h.derive_witness().data @ h.family_operator(s).data).real
    assert val == pytest.approx(0.5 * (1 - 2 * a - 2 * g), abs=1e-10)


def test_negativity_on_physical_states(rng):
    for _ in range(100):
        a = rng.uniform(0, 0.5)
        g = rng.uniform(0, 1 - 2 * a)
        s = h.TwoParamState(a, g)
        assert negativity(h.assemble(s), "trace_norm") == pytest.approx(
            h.negativity_closed_form(s), abs=1e-9)


def test_class_symmetry(rng):
    rho = h.assemble(h.TwoParamState(0.15, 0.4)).data
    for _ in range(10):
        x = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        u2, _ = np.linalg.qr(x)
        u3 = np.eye(3, dtype=complex)
        u3[:2, :2] = u2
        u = np.kron(u2, u3)
        assert np.allclose(u @ rho @ u.conj().T, rho, atol=1e-9)


def test_derived_witness_is_sound(rng):
    w = h.derive_witness().data
    vals = [np.trace(w @ random_product((2, 3), rng)).real for _ in range(2000)]
    assert min(vals) >= -1e-12


def test_printed_witness_detects_less():
    assert h.detection_fraction(h.derive_witness()) == pytest.approx(1.0)
    assert h.detection_fraction(h.printed_witness()) < 1.0


@pytest.mark.parametrize("idx,expected", [(11, 0.5), (10, 0.0)])
def test_detection_fraction_methods(idx, expected):
    co = h.bloch_decompose(h.derive_witness())
    op = co.reconstruct([idx])
    op = op * (1 / op.trace())
    exact = h.detection_fraction(op)
    assert exact == pytest.approx(expected, abs=1e-12)
    assert h.detection_fraction(op, "grid", resolution=400) == pytest.approx(exact, abs=0.005)
    mc = h.detection_fraction(op, "montecarlo", samples=200_000, seed=1)
    assert mc == pytest.approx(exact, abs=0.005)


def test_detection_fraction_rejects_bad_args():
    with pytest.raises(ValueError):
        h.detection_fraction(h.derive_witness(), domain="disk")
    with pytest.raises(ValueError):
        h.detection_fraction(h.derive_witness(), method="quadrature")


def test_subset_evaluation():
    single = h.evaluate_subset([11])
    assert single.valid and single.fraction is None
    assert single.decomposable is False
    assert not h.evaluate_subset([10]).valid
    assert h.evaluate_subset([0]).reason == "zero coefficient in subset"
    assert not h.evaluate_subset([11, 20, 29]).valid
    assert h.restricted_witness([11, 20, 29]) is None
    op = h.restricted_witness([10, 11])
    assert op.trace() == pytest.approx(1.0)
    with pytest.raises(IndexError):
        h.evaluate_subset([40])
    with pytest.raises(ValueError):
        h.evaluate_subset([11], validity="strict")


def test_fraction_curve_monotone_and_worst():
    rows, details = h.fraction_curve()
    fr = [f for _, f in rows]
    assert [k for k, _ in rows] == [1, 2, 3, 4]
    assert all(b >= a for a, b in zip(fr, fr[1:]))
    assert fr[0] == pytest.approx(0.5) and fr[-1] == pytest.approx(1.0)
    worst = h.worst_subsets(details)
    assert worst[4].labels == ("v8", "b11", "b22", "b33")
    assert len(details) == 15


def test_physical_domain_and_decomposable_rule():
    rows, _ = h.fraction_curve(domain="physical")
    assert rows[-1][1] == pytest.approx(1.0)
    rows, _ = h.fraction_curve(validity="decomposable")
    assert math.isnan(rows[0][1])
    assert rows[-1][1] == pytest.approx(1.0)
