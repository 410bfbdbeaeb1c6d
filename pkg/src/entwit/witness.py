"""Decomposable entanglement witnesses from measured expectation values.

A witness is restricted to W = I/d + sum_i c_i O_i over the measured
traceless observables O_i, so Tr W = 1 holds identically and
Tr(W rho) = 1/d + c . m.  The optimization looks for the smallest value of
that expression over all W admitting W = P + Q^{T_A} with P, Q >= 0.

Internally P is eliminated (P = W - Q^{T_A}) and Q is expanded in a
trace-orthonormal Hermitian basis, leaving a single block-diagonal linear
matrix inequality diag(W(c) - Q^{T_A}, Q) >= 0 in the variables (c, q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import sdp
from .measure import LABELS, MeasurementRecord, measure_noisy, observables_by_label
from .qmat import DensityMatrix, HermitianMatrix, eigvals, partial_transpose

DETECT_FLOOR = 1e-6
DEFAULT_ORDER = LABELS


def _pt_array(a: np.ndarray, dims: tuple[int, ...], subsystem: int) -> np.ndarray:
    n = len(dims)
    lead = a.shape[:-2]
    t = a.reshape(lead + dims + dims)
    t = np.swapaxes(t, len(lead) + subsystem, len(lead) + n + subsystem)
    return t.reshape(a.shape)


@dataclass(frozen=True)
class WitnessProblem:
    observables: tuple[tuple[str, HermitianMatrix], ...]
    m: MeasurementRecord
    partition: int = 0

    def __post_init__(self):
        labels = tuple(lab for lab, _ in self.observables)
        if not labels:
            raise ValueError("at least one observable is required")
        if labels != tuple(self.m.labels):
            raise ValueError(f"record labels {self.m.labels} do not match observables {labels}")
        dims = self.observables[0][1].dims
        for lab, op in self.observables:
            if op.dims != dims:
                raise ValueError(f"observable {lab} has dims {op.dims}, expected {dims}")
            if abs(op.trace()) > 1e-12:
                raise ValueError(f"observable {lab} is not traceless")
        if not 0 <= self.partition < len(dims):
            raise ValueError("partition index out of range")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.observables[0][1].dims

    @property
    def labels(self) -> tuple[str, ...]:
        return self.m.labels

    @classmethod
    def two_qubit(cls, record: MeasurementRecord) -> WitnessProblem:
        obs = observables_by_label()
        return cls(tuple((lab, obs[lab].matrix) for lab in record.labels), record)


@dataclass
class WitnessSolution:
    labels: tuple[str, ...]
    c: np.ndarray
    identity_coefficient: float
    W: HermitianMatrix
    P: HermitianMatrix
    Q: HermitianMatrix
    objective: float
    residuals: dict
    verdict: str
    threshold: float
    iterations: int
    measured: np.ndarray = field(repr=False, default=None)

    @property
    def detected(self) -> bool:
        return self.verdict == "entangled"

    def to_dict(self) -> dict:
        return {
            "coefficients": {lab: float(v) for lab, v in zip(self.labels, self.c)},
            "identity_coefficient": self.identity_coefficient,
            "objective": self.objective,
            "residuals": {k: float(v) for k, v in self.residuals.items()},
            "verdict": self.verdict,
            "threshold": self.threshold,
            "iterations": self.iterations,
            "measurements_used": len(self.labels),
        }


def detection_threshold(sigma: float, c: np.ndarray) -> float:
    if sigma <= 0:
        return DETECT_FLOOR
    return max(DETECT_FLOOR, 2 * sigma * float(np.linalg.norm(c)))


def solve_witness_sdp(p: WitnessProblem, tol: float = sdp.DEFAULT_TOL,
                      max_iter: int = sdp.MAX_ITER) -> WitnessSolution:
    """Minimize Tr(W rho) = 1/d + c.m over unit-trace decomposable witnesses."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    dims = p.dims
    d = math.prod(dims)
    k = len(p.observables)
    ops = np.array([op.data for _, op in p.observables])
    basis = sdp.hermitian_basis(d)
    zero_k = np.zeros((k, d, d))
    F_c = sdp.block_diag(ops, zero_k)
    F_q = sdp.block_diag(-_pt_array(basis, dims, p.partition), basis)
    F = np.concatenate([F_c, F_q])
    F0 = sdp.block_diag(np.eye(d) / d, np.zeros((d, d)))
    m = np.array(p.m.values)
    b = np.concatenate([m, np.zeros(d * d)])
    # c = 0, Q = I/(2d) gives P = Q = I/(2d), strictly inside
    y0 = np.concatenate([np.zeros(k), np.trace(basis, axis1=1, axis2=2).real / (2 * d)])

    res = sdp.solve_lmi(F0, F, b, y0, tol=tol, max_iter=max_iter)
    c = res.y[:k]
    W = np.eye(d) / d + np.tensordot(c, ops, axes=1)
    P = res.S[:d, :d]
    Q = res.S[d:, d:]
    Wm = HermitianMatrix(W, dims)
    Pm = HermitianMatrix(P, dims)
    Qm = HermitianMatrix(Q, dims)
    decomposition = float(np.linalg.norm(W - P - _pt_array(Q, dims, p.partition)))
    residuals = {
        "decomposition": decomposition,
        "min_eig_P": float(np.linalg.eigvalsh(P)[0]),
        "min_eig_Q": float(np.linalg.eigvalsh(Q)[0]),
        "trace_error": abs(float(np.trace(W).real) - 1.0),
        "duality_gap": res.gap,
        "primal_infeasibility": res.primal_infeasibility,
    }
    if not res.converged:
        raise sdp.SolverError(
            f"witness SDP did not converge in {res.iterations} iterations "
            f"(gap={res.gap:.3e}, pinf={res.primal_infeasibility:.3e})", res)
    objective = 1.0 / d + float(c @ m)
    threshold = detection_threshold(p.m.sigma, c)
    verdict = "entangled" if objective < -threshold else "not_detected"
    return WitnessSolution(p.labels, c, 1.0 / d, Wm, Pm, Qm, objective, residuals,
                           verdict, threshold, res.iterations, m)


def decomposition_margin(W: HermitianMatrix, partition: int = 0,
                         tol: float = 1e-9) -> tuple[float, HermitianMatrix, HermitianMatrix]:
    """Largest t with W = P + Q^{T_A}, P >= tI and Q >= tI.

    ``W`` is decomposable exactly when the returned margin is >= 0 (up to
    solver tolerance).  Also returns the P and Q achieving it.
    """
    dims = W.dims
    d = W.side
    basis = sdp.hermitian_basis(d)
    eye = np.eye(d)
    F_q = sdp.block_diag(-_pt_array(basis, dims, partition), basis)
    F_t = sdp.block_diag(-eye, -eye)[None]
    F = np.concatenate([F_q, F_t])
    F0 = sdp.block_diag(W.data, np.zeros((d, d)))
    b = np.zeros(d * d + 1)
    b[-1] = -1.0
    t0 = min(float(np.linalg.eigvalsh(W.data)[0]), 0.0) - 1.0
    y0 = np.zeros(d * d + 1)
    y0[-1] = t0
    res = sdp.solve_lmi(F0, F, b, y0, tol=tol)
    if not res.converged:
        raise sdp.SolverError("decomposability check did not converge", res)
    t = float(res.y[-1])
    Q = np.tensordot(res.y[:-1], basis, axes=1)
    P = W.data - _pt_array(Q, dims, partition)
    return t, HermitianMatrix(P, dims), HermitianMatrix(Q, dims)


def is_decomposable(W: HermitianMatrix, partition: int = 0, tol: float = 1e-7) -> bool:
    return decomposition_margin(W, partition)[0] >= -tol


def schmidt_coefficients(rho: DensityMatrix) -> np.ndarray:
    """Schmidt coefficients of a pure bipartite state, descending."""
    lam, vec = np.linalg.eigh(rho.data)
    if abs(lam[-1] - 1) > 1e-8:
        raise ValueError("state is not pure")
    psi = vec[:, -1].reshape(rho.dims[0], -1)
    return np.linalg.svd(psi, compute_uv=False)


def analytic_witness(rho: DensityMatrix) -> tuple[HermitianMatrix, float]:
    """W = c_opt I - rho with c_opt the largest squared Schmidt coefficient."""
    s = schmidt_coefficients(rho)
    c_opt = float(s[0] ** 2)
    if c_opt > 1 - 1e-8:
        raise ValueError("state is separable; no witness of this form detects it")
    W = HermitianMatrix(c_opt * np.eye(rho.side) - rho.data, rho.dims)
    return W, c_opt


@dataclass
class DetectionResult:
    verdict: str
    measurements_used: int
    trace: list[WitnessSolution]

    @property
    def final(self) -> WitnessSolution:
        return self.trace[-1]

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "measurements_used": self.measurements_used,
            "objective": self.final.objective,
            "final": self.final.to_dict(),
            "trace": [s.to_dict() for s in self.trace],
        }


def adaptive_detect(source: DensityMatrix | MeasurementRecord | Callable[[str], float],
                    order: Sequence[str] = DEFAULT_ORDER, sigma: float = 0.0,
                    seed=None, tol: float = sdp.DEFAULT_TOL,
                    operators: dict[str, HermitianMatrix] | None = None,
                    start: int = 3) -> DetectionResult:
    """Measure observables one at a time until the SDP certifies entanglement.

    ``source`` is a state (read out through ``measure_noisy`` with the given
    sigma and seed), an existing record covering ``order``, or any callable
    mapping a label to a measured value.  The first ``start`` observables are
    always measured together.
    """
    order = list(order)
    if len(order) < start:
        raise ValueError(f"order must contain at least {start} observables")
    if operators is None:
        if order[:3] != ["O1", "O2", "O3"]:
            raise ValueError("two-qubit order must begin with O1, O2, O3")
        obs = observables_by_label()
        operators = {lab: obs[lab].matrix for lab in order}
    if isinstance(source, MeasurementRecord):
        rec = source.subset(order)
    elif isinstance(source, HermitianMatrix):
        ops = None if all(lab in LABELS for lab in order) else operators
        rec = measure_noisy(source, order, sigma, seed, operators=ops)
    else:
        rec = MeasurementRecord(tuple(order), tuple(source(lab) for lab in order), sigma, seed)
    sigma = rec.sigma

    trace = []
    for used in range(start, len(order) + 1):
        labels = order[:used]
        problem = WitnessProblem(tuple((lab, operators[lab]) for lab in labels),
                                 rec.subset(labels))
        sol = solve_witness_sdp(problem, tol)
        trace.append(sol)
        if sol.detected:
            return DetectionResult("entangled", used, trace)
    return DetectionResult("not_detected", len(order), trace)


def min_pt_eigenvalue(rho: HermitianMatrix, partition: int = 0) -> float:
    return float(eigvals(partial_transpose(rho, partition))[0])
