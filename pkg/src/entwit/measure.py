"""The fifteen two-qubit observables and simulated expectation-value readout.

Each observable O_i is defined operationally: a unitary U maps the state so
that reading the z-magnetization I_kz of qubit k gives <O_i>, hence
O_i = U^dagger I_kz U.  Rotations X, Y are pi/2 turns exp(-i pi sigma / 4)
on one qubit; a trailing ``~`` marks the inverse rotation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .qmat import PAULI, DensityMatrix, HermitianMatrix, trace_inner

DEFAULT_SIGMA = 0.03
NOISE_CLIP = 5.0

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

# Gate sequences in the order they act on the state (first listed acts first),
# and the qubit whose z-magnetization is read out.
PULLBACK_TABLE = {
    "O1": (["Y1", "Y2", "CNOT"], 2),
    "O2": (["X1~", "X2~", "CNOT"], 2),
    "O3": (["CNOT"], 2),
    "O4": (["Y1", "X2~", "CNOT"], 2),
    "O5": (["Y1", "CNOT"], 2),
    "O6": (["X1", "Y2~", "CNOT"], 2),
    "O7": (["X1", "CNOT"], 2),
    "O8": (["Y2~", "CNOT"], 2),
    "O9": (["X2", "CNOT"], 2),
    "O10": (["Y1~"], 1),
    "O11": (["X1"], 1),
    "O12": ([], 1),
    "O13": (["Y2~"], 2),
    "O14": (["X2"], 2),
    "O15": ([], 2),
}

LABELS = tuple(PULLBACK_TABLE)


def _gate(name: str) -> np.ndarray:
    if name == "CNOT":
        return CNOT
    inverse = name.endswith("~")
    axis, qubit = name[0], int(name[1])
    sign = 1 if inverse else -1
    u = np.cos(np.pi / 4) * np.eye(2) + sign * 1j * np.sin(np.pi / 4) * PAULI[axis]
    return np.kron(u, np.eye(2)) if qubit == 1 else np.kron(np.eye(2), u)


def z_magnetization(qubit: int) -> np.ndarray:
    half_z = PAULI["Z"] / 2
    if qubit == 1:
        return np.kron(half_z, np.eye(2))
    return np.kron(np.eye(2), half_z)


def pullback_unitary(gates: Sequence[str]) -> np.ndarray:
    u = np.eye(4, dtype=complex)
    for g in gates:
        u = _gate(g) @ u
    return u


@dataclass(frozen=True, eq=False)
class Observable:
    label: str
    matrix: HermitianMatrix
    unitary: np.ndarray = field(repr=False)
    target_qubit: int

    def mapped_readout(self, rho: HermitianMatrix) -> float:
        """Tr(U rho U^dagger I_kz): the readout the pulse sequence performs."""
        u = self.unitary
        return float(np.trace(u @ rho.data @ u.conj().T @ z_magnetization(self.target_qubit)).real)


@lru_cache(maxsize=None)
def observable_set() -> tuple[Observable, ...]:
    out = []
    for label, (gates, qubit) in PULLBACK_TABLE.items():
        u = pullback_unitary(gates)
        u.setflags(write=False)
        m = HermitianMatrix(u.conj().T @ z_magnetization(qubit) @ u, (2, 2))
        out.append(Observable(label, m, u, qubit))
    return tuple(out)


def observables_by_label() -> dict[str, Observable]:
    return {o.label: o for o in observable_set()}


def expect(rho: HermitianMatrix, obs: Observable) -> float:
    if rho.dims != (2, 2):
        raise ValueError(f"two-qubit state expected, got dims {rho.dims}")
    return trace_inner(rho, obs.matrix)


@dataclass(frozen=True)
class MeasurementRecord:
    labels: tuple[str, ...]
    values: tuple[float, ...]
    sigma: float = 0.0
    seed: int | list | None = None

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if len(self.labels) != len(self.values):
            raise ValueError("labels and values differ in length")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.labels, self.values))

    def subset(self, labels: Sequence[str]) -> MeasurementRecord:
        lookup = self.as_dict()
        missing = [lab for lab in labels if lab not in lookup]
        if missing:
            raise KeyError(f"record has no values for {missing}")
        return MeasurementRecord(tuple(labels), tuple(lookup[lab] for lab in labels),
                                 self.sigma, self.seed)

    def to_dict(self) -> dict:
        return {"labels": list(self.labels), "values": list(self.values),
                "sigma": self.sigma, "seed": self.seed}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict) -> MeasurementRecord:
        return cls(tuple(d["labels"]), tuple(d["values"]), float(d.get("sigma", 0.0)),
                   d.get("seed"))

    @classmethod
    def from_json(cls, text: str) -> MeasurementRecord:
        return cls.from_dict(json.loads(text))


def noisy_values(exact: np.ndarray, sigma: float, seed) -> np.ndarray:
    """Add i.i.d. zero-mean Gaussian noise, clipped at five standard deviations."""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    exact = np.asarray(exact, dtype=float)
    if sigma == 0:
        return exact.copy()
    rng = np.random.default_rng(seed)
    noise = np.clip(rng.normal(0.0, sigma, size=exact.shape), -NOISE_CLIP * sigma,
                    NOISE_CLIP * sigma)
    return exact + noise


def measure_noisy(rho: DensityMatrix, labels: Sequence[str] = LABELS,
                  sigma: float = DEFAULT_SIGMA, seed=None,
                  operators: dict[str, HermitianMatrix] | None = None) -> MeasurementRecord:
    """Simulate a set of expectation-value readouts.

    ``operators`` maps labels to matrices for non-two-qubit systems; by
    default the labels refer to the fifteen two-qubit observables.
    """
    if operators is None:
        obs = observables_by_label()
        exact = [expect(rho, obs[lab]) for lab in labels]
    else:
        exact = [trace_inner(rho, operators[lab]) for lab in labels]
    values = noisy_values(np.array(exact), sigma, seed)
    return MeasurementRecord(tuple(labels), tuple(values.tolist()), float(sigma), seed)
