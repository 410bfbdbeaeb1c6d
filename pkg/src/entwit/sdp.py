"""Primal-dual interior-point method for small dense Hermitian LMIs.

Solves

    minimize    b . y
    subject to  S(y) = F0 + sum_i y_i F_i  >= 0

together with its dual

    maximize    -Tr(F0 X)
    subject to  Tr(F_i X) = b_i,  X >= 0

using the HKM search direction with Mehrotra predictor-corrector steps.
The iteration starts from a strictly feasible ``y0`` supplied by the caller
and keeps ``S`` exactly equal to ``S(y)`` throughout, so every returned
slack is a genuine positive definite point of the feasible set.  ``X``
starts at the identity and reaches primal feasibility along the way.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-7
MAX_ITER = 200
STEP_FRACTION = 0.95


class SolverError(RuntimeError):
    """The interior-point iteration stopped without meeting its tolerances."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


@dataclass
class LMIResult:
    y: np.ndarray
    S: np.ndarray
    X: np.ndarray
    objective: float
    dual_objective: float
    gap: float
    primal_infeasibility: float
    iterations: int
    converged: bool


def _chol(a: np.ndarray):
    try:
        return np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        return None


def _max_step(L: np.ndarray, d: np.ndarray) -> float:
    """Largest alpha with L L^H + alpha d still PSD (inf if unbounded)."""
    li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(li @ d @ li.conj().T)[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _herm(a: np.ndarray) -> np.ndarray:
    return (a + a.conj().T) / 2


def solve_lmi(F0: np.ndarray, F: np.ndarray, b: np.ndarray, y0: np.ndarray,
              tol: float = DEFAULT_TOL, max_iter: int = MAX_ITER) -> LMIResult:
    """Run the interior-point iteration.

    Parameters
    ----------
    F0 : (n, n) complex array
    F : (k, n, n) complex array
        Hermitian constraint matrices; should be linearly independent.
    b : (k,) real array
    y0 : (k,) real array
        Strictly feasible starting point, ``S(y0)`` positive definite.
    tol : float
        Target for both the duality gap ``Tr(X S)`` and the relative primal
        residual ``||b - Tr(F X)|| / (1 + ||b||)``.

    Returns
    -------
    LMIResult
        ``converged`` is False when ``max_iter`` ran out; the caller decides
        whether that is fatal.
    """
    F0 = np.asarray(F0, dtype=complex)
    F = np.asarray(F, dtype=complex)
    b = np.asarray(b, dtype=float)
    k, n = F.shape[0], F0.shape[0]
    # Tr(F_i Z) for Hermitian Z, as a real dot product of flattened entries
    Ft = F.transpose(0, 2, 1).reshape(k, n * n)

    def A(Z):
        return (Ft @ Z.reshape(-1)).real

    def S_of(y):
        return F0 + np.tensordot(y, F, axes=1)

    y = np.array(y0, dtype=float)
    S = S_of(y)
    LS = _chol(S)
    if LS is None:
        raise ValueError("starting point is not strictly feasible")
    X = np.eye(n, dtype=complex)
    bnorm = 1.0 + np.linalg.norm(b)
    it = 0
    converged = False
    gap = rel_pinf = np.inf

    for it in range(max_iter + 1):
        rp = b - A(X)
        gap = float(np.trace(X @ S).real)
        rel_pinf = float(np.linalg.norm(rp) / bnorm)
        if gap <= tol and rel_pinf <= tol:
            converged = True
            break
        if it == max_iter:
            break
        mu = gap / n
        Sinv = np.linalg.inv(S)
        Sinv = _herm(Sinv)
        G = X @ F @ Sinv  # (k, n, n): X F_j S^-1
        M = (Ft @ G.reshape(k, n * n).T).real
        M = (M + M.T) / 2
        try:
            cho = np.linalg.cholesky(M)
        except np.linalg.LinAlgError:
            cho = None

        def direction(R):
            rhs = A(R @ Sinv) - rp
            if cho is not None:
                dy = np.linalg.solve(cho.conj().T, np.linalg.solve(cho, rhs))
            else:
                dy = np.linalg.lstsq(M, rhs, rcond=None)[0]
            dS = np.tensordot(dy, F, axes=1)
            dX = _herm((R - X @ dS) @ Sinv)
            return dy, dS, dX

        LX = _chol(X)
        if LX is None:
            X = _herm(X) + 1e-14 * np.eye(n)
            LX = _chol(X)
        XS = X @ S
        dy, dS, dX = direction(-XS)
        ap = min(1.0, _max_step(LX, dX))
        ad = min(1.0, _max_step(LS, dS))
        mu_aff = float(np.trace((X + ap * dX) @ (S + ad * dS)).real) / n
        sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3

        R = sigma * mu * np.eye(n) - XS - dX @ dS
        dy, dS, dX = direction(R)
        ap = min(1.0, STEP_FRACTION * _max_step(LX, dX))
        ad = min(1.0, STEP_FRACTION * _max_step(LS, dS))

        X = _herm(X + ap * dX)
        while True:
            y_new = y + ad * dy
            S_new = S_of(y_new)
            L_new = _chol(S_new)
            if L_new is not None:
                break
            ad *= 0.5
            if ad < 1e-14:
                raise SolverError("dual step collapsed", None)
        y, S, LS = y_new, S_new, L_new
        logger.debug("it=%d gap=%.3e pinf=%.3e ap=%.3f ad=%.3f", it, gap, rel_pinf, ap, ad)

    return LMIResult(
        y=y, S=S, X=X,
        objective=float(b @ y),
        dual_objective=float(-np.trace(F0 @ X).real),
        gap=gap,
        primal_infeasibility=rel_pinf,
        iterations=it,
        converged=converged,
    )


def hermitian_basis(d: int) -> np.ndarray:
    """Trace-orthonormal basis of d x d Hermitian matrices, shape (d*d, d, d)."""
    out = []
    for j in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[j, j] = 1
        out.append(e)
    s = 1 / np.sqrt(2)
    for j in range(d):
        for k in range(j + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[j, k] = e[k, j] = s
            out.append(e)
            e = np.zeros((d, d), dtype=complex)
            e[j, k], e[k, j] = -1j * s, 1j * s
            out.append(e)
    return np.array(out)


def block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, m = a.shape[-1], b.shape[-1]
    shape = a.shape[:-2] + (n + m, n + m)
    out = np.zeros(shape, dtype=complex)
    out[..., :n, :n] = a
    out[..., n:, n:] = b
    return out
