import math

import numpy as np
import pytest

from entwit import states
from entwit.qmat import DensityMatrix, partial_transpose, eigvals
from entwit.states import (
    BELL_LABELS, CircuitParams, PseudopureState, bell, controlled_rotation_state,
    entangled_family, fidelity, from_label, negativity, separable_examples, state_labels,
)

from conftest import random_density


def test_bell_states_are_orthonormal():
    kets = list(states.BELL_KETS.values())
    gram = np.array([[np.vdot(a, b) for b in kets] for a in kets])
    assert np.allclose(gram, np.eye(4))


def test_bell_aliases():
    assert np.array_equal(bell("φ⁻").data, bell("phi-").data)
    with pytest.raises(ValueError):
        bell("chi")


def test_label_mapping():
    assert BELL_LABELS["B1"] == "phi-"
    assert np.allclose(from_label("B1").data, bell("phi-").data)
    assert len(state_labels()) == 20


@pytest.mark.parametrize("label", ["B1", "B2", "B3", "B4"])
def test_bell_negativity(label):
    rho = from_label(label)
    assert negativity(rho) == pytest.approx(0.5, abs=1e-12)
    assert negativity(rho, "trace_norm") == pytest.approx(1.0, abs=1e-12)


def test_separable_states_have_zero_negativity():
    for rho in separable_examples():
        assert negativity(rho) == pytest.approx(0.0, abs=1e-12)
        assert eigvals(partial_transpose(rho, 0))[0] >= -1e-12


@pytest.mark.parametrize("n", range(1, 15))
def test_family_negativity_closed_form(n):
    rho = entangled_family(n)
    assert negativity(rho) == pytest.approx(0.5 * math.sin(n * math.pi / 30), abs=1e-12)


def test_family_params():
    p = CircuitParams(5)
    assert p.theta == pytest.approx(math.pi / 6)
    assert p.tau_fraction == pytest.approx(1 / 6)
    with pytest.raises(ValueError):
        entangled_family(15)
    with pytest.raises(ValueError):
        entangled_family(0)
    assert np.allclose(entangled_family(p).data, controlled_rotation_state(math.pi / 6).data)


def test_pseudopure():
    pp = PseudopureState(bell("phi+"), epsilon=1e-5)
    dev = pp.deviation()
    assert abs(dev.trace()) < 1e-14
    assert np.allclose(dev.data / 1e-5, bell("phi+").data - np.eye(4) / 4)
    with pytest.raises(ValueError):
        PseudopureState(bell("phi+"), epsilon=2)


def test_fidelity(rng):
    a = DensityMatrix(random_density(4, rng), (2, 2))
    b = DensityMatrix(random_density(4, rng), (2, 2))
    assert fidelity(a, a) == pytest.approx(1.0, abs=1e-9)
    f = fidelity(a, b)
    assert 0 <= f <= 1
    assert f == pytest.approx(fidelity(b, a), abs=1e-9)
    assert fidelity(bell("phi+"), bell("phi-")) == pytest.approx(0.0, abs=1e-12)


def test_negativity_conventions_relation(rng):
    for _ in range(20):
        rho = DensityMatrix(random_density(6, rng), (2, 3))
        assert negativity(rho, "trace_norm") == pytest.approx(2 * negativity(rho), abs=1e-10)


def test_negativity_rejects_bad_input():
    with pytest.raises(ValueError):
        negativity(DensityMatrix(np.eye(8) / 8, (2, 2, 2)))
    with pytest.raises(ValueError):
        negativity(bell("phi+"), "log")


def test_hybrid_label():
    rho = from_label("H:alpha=0.3,gamma=0.3")
    assert rho.dims == (2, 3)
    assert negativity(rho, "trace_norm") == pytest.approx(0.2, abs=1e-10)
    with pytest.raises(ValueError):
        from_label("X7")
