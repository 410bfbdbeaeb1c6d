"""Dense Hermitian operators on small multipartite Hilbert spaces.

Everything here works on side lengths of at most 16, so all matrices are
stored densely as complex numpy arrays.  Values are immutable once built.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
MAX_SIDE = 16

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class EigenError(RuntimeError):
    """Raised when the Jacobi iteration fails to converge."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Complex Hermitian matrix tagged with its subsystem dimensions.

    Parameters
    ----------
    data : array_like
        Square complex matrix.  Asymmetry up to ``1e-12`` (relative to the
        matrix scale) is absorbed by symmetrizing; anything larger raises.
    dims : sequence of int, optional
        Subsystem dimensions whose product equals the side length.  Defaults
        to a single subsystem.
    """

    data: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        a = np.asarray(self.data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        n = a.shape[0]
        dims = tuple(int(d) for d in self.dims) if len(self.dims) else (n,)
        if any(d < 1 for d in dims) or math.prod(dims) != n:
            raise ValueError(f"dims {dims} do not match side {n}")
        if n > MAX_SIDE:
            raise ValueError(f"side {n} exceeds supported maximum {MAX_SIDE}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix has non-finite entries")
        ah = a.conj().T
        if not np.array_equal(a, ah):
            scale = max(1.0, float(np.max(np.abs(a))))
            if np.max(np.abs(a - ah)) > HERMITIAN_TOL * scale:
                raise ValueError("matrix is not Hermitian")
            a = (a + ah) / 2
        object.__setattr__(self, "data", _frozen(a))
        object.__setattr__(self, "dims", dims)

    @property
    def side(self) -> int:
        return self.data.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def __add__(self, other: HermitianMatrix) -> HermitianMatrix:
        _check_dims(self, other)
        return HermitianMatrix(self.data + other.data, self.dims)

    def __sub__(self, other: HermitianMatrix) -> HermitianMatrix:
        _check_dims(self, other)
        return HermitianMatrix(self.data - other.data, self.dims)

    def __mul__(self, scalar: float) -> HermitianMatrix:
        if isinstance(scalar, complex) or np.iscomplexobj(scalar):
            raise TypeError("Hermitian matrices scale by real numbers only")
        return HermitianMatrix(self.data * float(scalar), self.dims)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}(dims={list(self.dims)}, side={self.side})"

    def to_dict(self) -> dict:
        return {
            "dims": list(self.dims),
            "re": self.data.real.tolist(),
            "im": self.data.imag.tolist(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d: dict):
        data = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        return cls(data, tuple(d["dims"]))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))


class DensityMatrix(HermitianMatrix):
    """Unit-trace positive semidefinite Hermitian matrix."""

    def __post_init__(self):
        super().__post_init__()
        tr = np.trace(self.data)
        if abs(tr - 1) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {tr.real:.12g}, not 1")
        lam = np.linalg.eigvalsh(self.data)[0]
        if lam < -PSD_TOL:
            raise ValueError(f"density matrix has eigenvalue {lam:.3g} < 0")

    @classmethod
    def from_ket(cls, psi, dims: Sequence[int] = ()) -> DensityMatrix:
        psi = np.asarray(psi, dtype=complex).ravel()
        psi = psi / np.linalg.norm(psi)
        return cls(np.outer(psi, psi.conj()), tuple(dims))


@dataclass(frozen=True)
class Spectrum:
    """Ascending real eigenvalues with eigenvectors as unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_dims(a: HermitianMatrix, b: HermitianMatrix):
    if a.side != b.side:
        raise ValueError(f"dimension mismatch: {a.side} vs {b.side}")


def identity(dims: Sequence[int]) -> HermitianMatrix:
    return HermitianMatrix(np.eye(math.prod(dims)), tuple(dims))


def kron(a: HermitianMatrix, b: HermitianMatrix) -> HermitianMatrix:
    return HermitianMatrix(np.kron(a.data, b.data), a.dims + b.dims)


def kron_all(factors: Sequence[HermitianMatrix]) -> HermitianMatrix:
    return reduce(kron, factors)


def partial_transpose(m: HermitianMatrix, subsystem: int) -> HermitianMatrix:
    """Transpose the indices belonging to one subsystem.

    Pure index permutation, so applying it twice returns the input bitwise.
    """
    n = len(m.dims)
    if not 0 <= subsystem < n:
        raise IndexError(f"subsystem {subsystem} out of range for dims {m.dims}")
    t = m.data.reshape(m.dims + m.dims)
    t = np.swapaxes(t, subsystem, n + subsystem)
    return HermitianMatrix(t.reshape(m.side, m.side), m.dims)


def trace_inner(a: HermitianMatrix, b: HermitianMatrix) -> float:
    """Re Tr(a b), computed as an entrywise sum."""
    _check_dims(a, b)
    return float(np.sum(a.data * b.data.T).real)


def _jacobi(a: np.ndarray, tol: float, max_sweeps: int):
    a = np.array(a, dtype=complex, copy=True)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= tol * scale:
            return np.diag(a).real.copy(), v, sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                r = abs(z)
                if r <= 1e-300:
                    continue
                phase = z / r
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2 * r)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                # J = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                j = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ j
                a[idx, :] = j.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0
                a[p, p], a[q, q] = a[p, p].real, a[q, q].real
                v[:, idx] = v[:, idx] @ j
    raise EigenError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def eig(m: HermitianMatrix, tol: float = JACOBI_TOL,
        max_sweeps: int = JACOBI_MAX_SWEEPS) -> Spectrum:
    """Eigendecomposition by cyclic complex Jacobi rotations."""
    lam, v, sweeps = _jacobi(m.data, tol, max_sweeps)
    order = np.argsort(lam, kind="stable")
    lam, v = lam[order], v[:, order]
    lam.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(lam, v, sweeps)


def eigvals(m: HermitianMatrix) -> np.ndarray:
    return eig(m).eigenvalues


def negative_eigenvalue_sum(m: HermitianMatrix) -> float:
    """Sum of |lambda| over the negative eigenvalues of ``m``."""
    lam = eigvals(m)
    return float(-np.sum(lam[lam < 0]))


def trace_norm(m: HermitianMatrix) -> float:
    return float(np.sum(np.abs(eigvals(m))))


def trace_norm_negativity(m: HermitianMatrix) -> float:
    """||m||_1 - Tr m; twice ``negative_eigenvalue_sum`` for unit trace."""
    lam = eigvals(m)
    return float(np.sum(np.abs(lam)) - np.sum(lam))


def expm_herm(m: HermitianMatrix, scale: complex) -> np.ndarray:
    """exp(scale * m) via the eigendecomposition; returns a plain array."""
    sp = eig(m)
    v = sp.eigenvectors
    return (v * np.exp(scale * sp.eigenvalues)) @ v.conj().T


def sqrtm_psd(m: HermitianMatrix) -> np.ndarray:
    sp = eig(m)
    v = sp.eigenvectors
    return (v * np.sqrt(np.clip(sp.eigenvalues, 0, None))) @ v.conj().T
