import numpy as np
import pytest

from entwit.measure import (
    LABELS, MeasurementRecord, expect, measure_noisy, noisy_values, observable_set,
    observables_by_label,
)
from entwit.qmat import PAULI
from entwit.states import bell, from_label

P = PAULI
EXPECTED = {
    "O1": ("X", "X", 1), "O2": ("Y", "Y", 1), "O3": ("Z", "Z", 1),
    "O4": ("X", "Y", 1), "O5": ("X", "Z", -1), "O6": ("Y", "X", 1),
    "O7": ("Y", "Z", 1), "O8": ("Z", "X", 1), "O9": ("Z", "Y", 1),
    "O10": ("X", "I", 1), "O11": ("Y", "I", 1), "O12": ("Z", "I", 1),
    "O13": ("I", "X", 1), "O14": ("I", "Y", 1), "O15": ("I", "Z", 1),
}


@pytest.mark.parametrize("label", LABELS)
def test_pullbacks_are_product_operators(label):
    a, b, sign = EXPECTED[label]
    o = observables_by_label()[label]
    assert np.allclose(o.matrix.data, sign * np.kron(P[a], P[b]) / 2, atol=1e-12)


def test_observables_are_trace_orthonormal():
    ops = [o.matrix.data for o in observable_set()]
    gram = np.array([[np.trace(a @ b).real for b in ops] for a in ops])
    assert np.allclose(gram, np.eye(15), atol=1e-12)
    assert all(abs(np.trace(a)) < 1e-12 for a in ops)


def test_mapped_readout_matches_expectation():
    rho = from_label("E4")
    for o in observable_set():
        assert o.mapped_readout(rho) == pytest.approx(expect(rho, o), abs=1e-12)


def test_bell_values():
    obs = observables_by_label()
    rho = bell("phi-")
    vals = [expect(rho, obs[k]) for k in ("O1", "O2", "O3")]
    assert np.allclose(vals, [-0.5, 0.5, 0.5])


def test_noiseless_record_is_exact():
    rec = measure_noisy(bell("phi+"), sigma=0.0)
    assert rec.labels == LABELS
    assert rec.as_dict()["O1"] == pytest.approx(0.5)


def test_seeded_noise_is_reproducible():
    a = measure_noisy(bell("phi+"), sigma=0.03, seed=[1, 2])
    b = measure_noisy(bell("phi+"), sigma=0.03, seed=[1, 2])
    c = measure_noisy(bell("phi+"), sigma=0.03, seed=[1, 3])
    assert a.values == b.values
    assert a.values != c.values


def test_noise_statistics_and_clip():
    exact = np.zeros(200_000)
    v = noisy_values(exact, 0.03, 7)
    assert np.std(v) == pytest.approx(0.03, rel=0.01)
    assert np.max(np.abs(v)) <= 5 * 0.03
    with pytest.raises(ValueError):
        noisy_values(exact, -1, 0)


def test_values_bounded_under_noise():
    for seed in range(50):
        rec = measure_noisy(from_label("E9"), sigma=0.03, seed=seed)
        assert max(abs(x) for x in rec.values) <= 0.5 + 5 * 0.03


def test_record_json_and_subset():
    rec = measure_noisy(bell("psi+"), sigma=0.01, seed=42)
    back = MeasurementRecord.from_json(rec.to_json())
    assert back == rec
    sub = rec.subset(["O3", "O1"])
    assert sub.labels == ("O3", "O1")
    assert sub.values == (rec.as_dict()["O3"], rec.as_dict()["O1"])
    with pytest.raises(KeyError):
        sub.subset(["O2"])
    with pytest.raises(ValueError):
        MeasurementRecord(("O1",), (0.1, 0.2))


def test_expect_rejects_qutrit():
    with pytest.raises(ValueError):
        expect(from_label("H:alpha=0.1,gamma=0.2"), observable_set()[0])
