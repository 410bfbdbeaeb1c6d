"""Two-qubit test states, the pseudopure form, fidelity and negativity."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .qmat import (
    DensityMatrix,
    HermitianMatrix,
    negative_eigenvalue_sum,
    partial_transpose,
    sqrtm_psd,
    eigvals,
    trace_norm_negativity,
)

SQRT_HALF = 1 / math.sqrt(2)

BELL_KETS = {
    "phi+": np.array([1, 0, 0, 1]) * SQRT_HALF,
    "phi-": np.array([1, 0, 0, -1]) * SQRT_HALF,
    "psi+": np.array([0, 1, 1, 0]) * SQRT_HALF,
    "psi-": np.array([0, 1, -1, 0]) * SQRT_HALF,
}
_BELL_ALIASES = {"φ⁺": "phi+", "φ⁻": "phi-", "ψ⁺": "psi+", "ψ⁻": "psi-"}

# Which Bell state each B label stands for.  B1 is the worked phi- example.
BELL_LABELS = {"B1": "phi-", "B2": "phi+", "B3": "psi-", "B4": "psi+"}

N_FAMILY = 14
CONVENTIONS = ("table", "trace_norm")


@dataclass(frozen=True)
class CircuitParams:
    """Step index of the controlled-rotation sequence, theta = n pi / 30."""

    n: int

    @property
    def theta(self) -> float:
        return self.n * math.pi / 30

    @property
    def tau_fraction(self) -> float:
        """Evolution time in units of 1/J."""
        return self.n / 30


@dataclass(frozen=True)
class PseudopureState:
    pure_part: DensityMatrix
    epsilon: float = 1e-5

    def __post_init__(self):
        if not 0 <= self.epsilon <= 1:
            raise ValueError("epsilon must lie in [0, 1]")

    def assembled(self) -> DensityMatrix:
        d = self.pure_part.side
        a = (1 - self.epsilon) * np.eye(d) / d + self.epsilon * self.pure_part.data
        return DensityMatrix(a, self.pure_part.dims)

    def deviation(self) -> HermitianMatrix:
        """Traceless part that an ensemble measurement actually sees."""
        d = self.pure_part.side
        return HermitianMatrix(self.assembled().data - np.eye(d) / d, self.pure_part.dims)


def bell(which: str) -> DensityMatrix:
    key = _BELL_ALIASES.get(which, which)
    if key not in BELL_KETS:
        raise ValueError(f"unknown Bell state {which!r}")
    return DensityMatrix.from_ket(BELL_KETS[key], (2, 2))


def controlled_rotation_state(theta: float) -> DensityMatrix:
    """cos(theta/2)|00> + sin(theta/2)|11>."""
    return DensityMatrix.from_ket(
        [math.cos(theta / 2), 0, 0, math.sin(theta / 2)], (2, 2))


def entangled_family(p: CircuitParams | int) -> DensityMatrix:
    if isinstance(p, int):
        p = CircuitParams(p)
    if not 1 <= p.n <= N_FAMILY:
        raise ValueError(f"family index n={p.n} outside 1..{N_FAMILY}")
    return controlled_rotation_state(p.theta)


def separable_examples() -> list[DensityMatrix]:
    """|00> and |++>."""
    plus = np.array([1, 1]) * SQRT_HALF
    return [
        DensityMatrix.from_ket([1, 0, 0, 0], (2, 2)),
        DensityMatrix.from_ket(np.kron(plus, plus), (2, 2)),
    ]


def fidelity(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Uhlmann-Jozsa fidelity (Tr sqrt(sqrt(a) b sqrt(a)))**2."""
    if a.side != b.side:
        raise ValueError(f"dimension mismatch: {a.side} vs {b.side}")
    sa = sqrtm_psd(a)
    inner = HermitianMatrix(sa @ b.data @ sa, a.dims)
    lam = np.clip(eigvals(inner), 0, None)
    return float(min(1.0, max(0.0, np.sum(np.sqrt(lam)) ** 2)))


def negativity(rho: HermitianMatrix, convention: str = "table") -> float:
    """Negativity of a 2x2 or 2x3 state, PT taken on the first subsystem.

    ``table`` is the sum of |negative eigenvalues| of the partial transpose;
    ``trace_norm`` is ||rho^PT||_1 - 1, twice as large for unit trace.
    """
    if rho.dims not in ((2, 2), (2, 3)):
        raise ValueError(f"unsupported dims {rho.dims}; expected (2, 2) or (2, 3)")
    pt = partial_transpose(rho, 0)
    if convention == "table":
        return negative_eigenvalue_sum(pt)
    if convention == "trace_norm":
        return trace_norm_negativity(pt)
    raise ValueError(f"unknown convention {convention!r}; use one of {CONVENTIONS}")


_H_LABEL = re.compile(r"^H:alpha=([^,]+),gamma=([^,]+)$")


def state_labels() -> list[str]:
    """The twenty two-qubit labels in table order."""
    return (list(BELL_LABELS) + ["S1", "S2"]
            + [f"E{n}" for n in range(1, N_FAMILY + 1)])


def from_label(label: str) -> DensityMatrix:
    """Build a state from 'B1'..'B4', 'S1', 'S2', 'E1'..'E14' or 'H:alpha=..,gamma=..'."""
    label = label.strip()
    if label in BELL_LABELS:
        return bell(BELL_LABELS[label])
    if label in ("S1", "S2"):
        return separable_examples()[int(label[1]) - 1]
    m = re.fullmatch(r"E(\d+)", label)
    if m:
        return entangled_family(int(m.group(1)))
    m = _H_LABEL.match(label.replace(" ", ""))
    if m:
        from .hybrid23 import TwoParamState, assemble

        return assemble(TwoParamState(float(m.group(1)), float(m.group(2))))
    raise ValueError(f"unknown state label {label!r}")
