"""Qubit-qutrit (2 x 3) states, their witness, and the detection-fraction study.

The two-parameter class mixes the qubit-qutrit states |02>, |12> with the
four Bell states living on the qubit and the {|0>, |1>} levels of the
qutrit.  Its expectation values are affine in (alpha, gamma), which is used
throughout: any Tr(W rho) is evaluated exactly from three numbers.

Bloch expansion convention used here::

    O = (1/6) [ t I + sum_i u_i s_i x I + sqrt(3) sum_j v_j I x l_j
                + sum_ij beta_ij s_i x l_j ]

with Pauli matrices s_i and Gell-Mann matrices l_j (Tr l_i l_j = 2 delta_ij).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .qmat import (
    PAULI,
    DensityMatrix,
    HermitianMatrix,
    eig,
    eigvals,
    partial_transpose,
    trace_inner,
)

DIMS = (2, 3)
ALPHA_MAX = 0.5
GAMMA_MAX = 1.0
DOMAINS = ("rectangle", "physical")
COEFF_TOL = 1e-12
FAMILY_TOL = 1e-12


def gell_mann() -> np.ndarray:
    """The eight standard Gell-Mann matrices, shape (8, 3, 3)."""
    l = np.zeros((8, 3, 3), dtype=complex)
    l[0][0, 1] = l[0][1, 0] = 1
    l[1][0, 1], l[1][1, 0] = -1j, 1j
    l[2][0, 0], l[2][1, 1] = 1, -1
    l[3][0, 2] = l[3][2, 0] = 1
    l[4][0, 2], l[4][2, 0] = -1j, 1j
    l[5][1, 2] = l[5][2, 1] = 1
    l[6][1, 2], l[6][2, 1] = -1j, 1j
    l[7] = np.diag([1, 1, -2]) / math.sqrt(3)
    return l


_SIGMA = np.array([PAULI["X"], PAULI["Y"], PAULI["Z"]])


@lru_cache(maxsize=None)
def bloch_operators() -> tuple[tuple[str, HermitianMatrix], ...]:
    """The 35 traceless product operators in coefficient order.

    Labels are u1..u3 (s_i x I), v1..v8 (I x l_j) and b11..b38 (s_i x l_j),
    the last group row-major in i.
    """
    lam = gell_mann()
    out = []
    for i in range(3):
        out.append((f"u{i + 1}", HermitianMatrix(np.kron(_SIGMA[i], np.eye(3)), DIMS)))
    for j in range(8):
        out.append((f"v{j + 1}", HermitianMatrix(np.kron(np.eye(2), lam[j]), DIMS)))
    for i in range(3):
        for j in range(8):
            out.append((f"b{i + 1}{j + 1}",
                        HermitianMatrix(np.kron(_SIGMA[i], lam[j]), DIMS)))
    return tuple(out)


def bloch_labels() -> list[str]:
    return [lab for lab, _ in bloch_operators()]


def bloch_operator_dict() -> dict[str, HermitianMatrix]:
    return dict(bloch_operators())


# Weight multiplying each coefficient group in the expansion above.
NORMALIZATION = {"t": 1 / 6, "u": 1 / 6, "v": math.sqrt(3) / 6, "beta": 1 / 6}


def _flat_weights() -> np.ndarray:
    return np.array([NORMALIZATION["u"]] * 3 + [NORMALIZATION["v"]] * 8
                    + [NORMALIZATION["beta"]] * 24)


@dataclass(frozen=True)
class BlochCoefficients:
    t: float
    u: np.ndarray
    v: np.ndarray
    beta_matrix: np.ndarray
    normalization: dict

    @property
    def flat(self) -> np.ndarray:
        """The 35 non-identity coefficients: u, then v, then beta row-major."""
        return np.concatenate([self.u, self.v, self.beta_matrix.ravel()])

    def reconstruct(self, subset: Iterable[int] | None = None) -> HermitianMatrix:
        """Rebuild the operator, optionally keeping only some coefficients."""
        coeffs = self.flat
        if subset is not None:
            keep = np.zeros(35, dtype=bool)
            keep[list(subset)] = True
            coeffs = np.where(keep, coeffs, 0.0)
        ops = np.array([op.data for _, op in bloch_operators()])
        data = (self.normalization["t"] * self.t * np.eye(6)
                + np.tensordot(coeffs * _flat_weights(), ops, axes=1))
        return HermitianMatrix(data, DIMS)


def bloch_decompose(op: HermitianMatrix) -> BlochCoefficients:
    """Expansion coefficients by trace pairing against the product operators."""
    if op.side != 6:
        raise ValueError(f"6 x 6 operator expected, got side {op.side}")
    op = HermitianMatrix(op.data, DIMS)
    pairs = np.array([trace_inner(op, b) for _, b in bloch_operators()])
    # Tr(B_k^2) is 6 for s x I and 4 for the others
    norms = np.array([6.0] * 3 + [4.0] * 32)
    flat = pairs / (norms * _flat_weights())
    t = op.trace() / (6 * NORMALIZATION["t"])
    return BlochCoefficients(t, flat[:3], flat[3:11], flat[11:].reshape(3, 8),
                             dict(NORMALIZATION))


@dataclass(frozen=True)
class TwoParamState:
    alpha: float
    gamma: float

    def __post_init__(self):
        if not -FAMILY_TOL <= self.alpha <= ALPHA_MAX + FAMILY_TOL:
            raise ValueError(f"alpha={self.alpha} outside [0, 1/2]")
        if not -FAMILY_TOL <= self.gamma <= GAMMA_MAX + FAMILY_TOL:
            raise ValueError(f"gamma={self.gamma} outside [0, 1]")

    @property
    def beta(self) -> float:
        return (1 - 2 * self.alpha - self.gamma) / 3

    @property
    def physical(self) -> bool:
        return self.beta >= -FAMILY_TOL

    @property
    def entangled(self) -> bool:
        return self.alpha + self.gamma > 0.5


def _ket(i: int, j: int) -> np.ndarray:
    v = np.zeros(6)
    v[3 * i + j] = 1
    return v


_S = 1 / math.sqrt(2)
HYBRID_BELL = {
    "phi+": _S * (_ket(0, 0) + _ket(1, 1)),
    "phi-": _S * (_ket(0, 0) - _ket(1, 1)),
    "psi+": _S * (_ket(0, 1) + _ket(1, 0)),
    "psi-": _S * (_ket(0, 1) - _ket(1, 0)),
}


def _proj(v: np.ndarray) -> np.ndarray:
    return np.outer(v, v)


# rho(alpha, gamma) = R0 + alpha * RA + gamma * RG after eliminating beta
_ALPHA_PART = _proj(_ket(0, 2)) + _proj(_ket(1, 2))
_BETA_PART = sum(_proj(HYBRID_BELL[k]) for k in ("phi+", "phi-", "psi+"))
_GAMMA_PART = _proj(HYBRID_BELL["psi-"])
R0 = _BETA_PART / 3
RA = _ALPHA_PART - 2 * _BETA_PART / 3
RG = _GAMMA_PART - _BETA_PART / 3


def family_operator(s: TwoParamState) -> HermitianMatrix:
    """The class matrix for any (alpha, gamma); not PSD where beta < 0."""
    data = s.alpha * _ALPHA_PART + s.beta * _BETA_PART + s.gamma * _GAMMA_PART
    return HermitianMatrix(data, DIMS)


def assemble(s: TwoParamState) -> DensityMatrix:
    if not s.physical:
        raise ValueError(f"beta={s.beta:.3g} < 0: (alpha, gamma) is outside the state simplex")
    return DensityMatrix(family_operator(s).data, DIMS)


def pt_spectrum(s: TwoParamState) -> np.ndarray:
    """Ascending eigenvalues of the qubit partial transpose."""
    return eigvals(partial_transpose(family_operator(s), 0))


def pt_spectrum_closed_form(s: TwoParamState) -> np.ndarray:
    a, g = s.alpha, s.gamma
    lam = [a, a, (1 - 2 * a + 2 * g) / 6, (1 - 2 * a + 2 * g) / 6,
           (1 - 2 * a + 2 * g) / 6, (1 - 2 * a - 2 * g) / 2]
    return np.sort(lam)


def negativity_closed_form(s: TwoParamState) -> float:
    """Trace-norm negativity max(2 alpha + 2 gamma - 1, 0)."""
    return max(2 * s.alpha + 2 * s.gamma - 1, 0.0)


# Non-degenerate reference point for picking out the negative PT eigenvector.
_REFERENCE = TwoParamState(0.1, 0.7)


def witness_eigenvector() -> np.ndarray:
    s = _REFERENCE
    sp = eig(partial_transpose(family_operator(s), 0))
    target = (1 - 2 * s.alpha - 2 * s.gamma) / 2
    idx = int(np.argmin(np.abs(sp.eigenvalues - target)))
    eta = np.array(sp.eigenvectors[:, idx])
    k = int(np.argmax(np.abs(eta)))
    eta = eta * (abs(eta[k]) / eta[k])
    eta[np.abs(eta) < 1e-14] = 0
    return eta


def derive_witness() -> HermitianMatrix:
    """(|eta><eta|)^PT for the eigenvector carrying (1 - 2a - 2g)/2."""
    eta = witness_eigenvector()
    proj = HermitianMatrix(np.outer(eta, eta.conj()), DIMS)
    return partial_transpose(proj, 0)


def printed_witness() -> HermitianMatrix:
    """The witness matrix with its last diagonal 1/2 on |12><12| instead of |11><11|.

    Kept for comparison only: it is not the partial transpose of the
    eigenvector projector and does not reproduce full detection.
    """
    data = np.zeros((6, 6))
    data[0, 0] = data[1, 3] = data[3, 1] = data[5, 5] = 0.5
    return HermitianMatrix(data, DIMS)


def affine_trace(w: HermitianMatrix) -> tuple[float, float, float]:
    """(c0, ca, cg) with Tr(w rho(alpha, gamma)) = c0 + ca alpha + cg gamma."""
    wd = w.data
    return tuple(float(np.sum(wd * r.T).real) for r in (R0, RA, RG))


def trace_surface(w: HermitianMatrix, alpha, gamma) -> np.ndarray:
    c0, ca, cg = affine_trace(w)
    return c0 + ca * np.asarray(alpha) + cg * np.asarray(gamma)


# --------------------------------------------------------------------------
# Detection fraction over the parameter domain.

def _domain_polygon(domain: str) -> list[tuple[float, float]]:
    if domain == "rectangle":
        return [(0.0, 0.0), (ALPHA_MAX, 0.0), (ALPHA_MAX, GAMMA_MAX), (0.0, GAMMA_MAX)]
    if domain == "physical":
        # beta >= 0  <=>  gamma <= 1 - 2 alpha
        return [(0.0, 0.0), (ALPHA_MAX, 0.0), (0.0, 1.0)]
    raise ValueError(f"unknown domain {domain!r}; use one of {DOMAINS}")


def _clip(poly, a, b, c):
    """Keep the part of a convex polygon where a*x + b*y + c >= 0."""
    out = []
    n = len(poly)
    for i in range(n):
        p, q = poly[i], poly[(i + 1) % n]
        fp = a * p[0] + b * p[1] + c
        fq = a * q[0] + b * q[1] + c
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append((p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])))
    return out


def _area(poly) -> float:
    if len(poly) < 3:
        return 0.0
    x = np.array([p[0] for p in poly])
    y = np.array([p[1] for p in poly])
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def _entangled_region(domain: str):
    # alpha + gamma - 1/2 >= 0
    return _clip(_domain_polygon(domain), 1.0, 1.0, -0.5)


def _separable_region(domain: str):
    return _clip(_domain_polygon(domain), -1.0, -1.0, 0.5)


def detection_fraction(w: HermitianMatrix, method: str = "exact", samples: int = 1_000_000,
                       seed=None, domain: str = "rectangle", resolution: int = 1000) -> float:
    """Share of the entangled (alpha, gamma) region on which Tr(w rho) < 0.

    ``exact`` clips polygons analytically; ``grid`` uses a midpoint grid of
    ``resolution`` x ``resolution`` cells; ``montecarlo`` draws ``samples``
    uniform points from the bounding rectangle with the given seed.
    """
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}; use one of {DOMAINS}")
    c0, ca, cg = affine_trace(w)
    if method == "exact":
        ent = _entangled_region(domain)
        # detected where c0 + ca a + cg g < 0
        hit = _clip(ent, -ca, -cg, -c0)
        return _area(hit) / _area(ent)
    if method == "grid":
        a = (np.arange(resolution) + 0.5) / resolution * ALPHA_MAX
        g = (np.arange(resolution) + 0.5) / resolution * GAMMA_MAX
        A, G = np.meshgrid(a, g, indexing="ij")
    elif method == "montecarlo":
        rng = np.random.default_rng(seed)
        A = rng.uniform(0, ALPHA_MAX, samples)
        G = rng.uniform(0, GAMMA_MAX, samples)
    else:
        raise ValueError(f"unknown method {method!r}")
    inside = np.ones(A.shape, dtype=bool) if domain == "rectangle" else (G <= 1 - 2 * A)
    ent = inside & (A + G > 0.5)
    det = ent & (c0 + ca * A + cg * G < 0)
    n_ent = int(np.count_nonzero(ent))
    return float(np.count_nonzero(det)) / n_ent if n_ent else 0.0


# --------------------------------------------------------------------------
# Witnesses rebuilt from a subset of the expansion coefficients.

VALIDITY_RULES = ("family", "decomposable")


@dataclass
class SubsetWitness:
    subset: tuple[int, ...]
    labels: tuple[str, ...]
    operator: HermitianMatrix | None
    valid: bool
    reason: str
    decomposable: bool | None = None
    fraction: float | None = None


def support(w: HermitianMatrix | None = None, tol: float = COEFF_TOL) -> list[int]:
    """Indices of the non-zero expansion coefficients of ``w``."""
    w = derive_witness() if w is None else w
    return [int(i) for i in np.flatnonzero(np.abs(bloch_decompose(w).flat) > tol)]


def _family_check(op: HermitianMatrix, domain: str) -> tuple[bool, str]:
    c0, ca, cg = affine_trace(op)

    def lo(poly):
        return min(c0 + ca * a + cg * g for a, g in poly)

    if lo(_separable_region(domain)) < -1e-12:
        return False, "negative on separable members of the family"
    if lo(_entangled_region(domain)) >= -1e-12:
        return False, "detects no member of the family"
    return True, "ok"


def evaluate_subset(subset: Sequence[int], w: HermitianMatrix | None = None,
                    validity: str = "family", domain: str = "rectangle",
                    check_decomposable: bool = True) -> SubsetWitness:
    """Restrict the witness expansion to ``subset`` and judge the result.

    The kept operator is (1/6)[I + chosen terms], which already has unit
    trace.  Under the ``family`` rule it is accepted when Tr(W rho) >= 0 on
    every separable member of the two-parameter class in ``domain`` and is
    negative on at least one entangled member.  The ``decomposable`` rule
    instead demands an exact W = P + Q^PT split with P, Q >= 0 and W not
    positive semidefinite.  Every chosen coefficient must be non-zero.
    """
    from .witness import is_decomposable

    if validity not in VALIDITY_RULES:
        raise ValueError(f"unknown validity rule {validity!r}")
    subset = tuple(sorted(int(i) for i in subset))
    if not subset:
        raise ValueError("subset must be non-empty")
    if any(not 0 <= i < 35 for i in subset):
        raise IndexError("subset indices must lie in 0..34")
    labels = tuple(bloch_labels()[i] for i in subset)
    w = derive_witness() if w is None else w
    coeffs = bloch_decompose(w)
    if np.any(np.abs(coeffs.flat[list(subset)]) <= COEFF_TOL):
        return SubsetWitness(subset, labels, None, False, "zero coefficient in subset")
    op = coeffs.reconstruct(subset)
    op = op * (1.0 / op.trace())
    decomposable = None
    if check_decomposable or validity == "decomposable":
        decomposable = is_decomposable(op)
    if validity == "family":
        valid, reason = _family_check(op, domain)
    else:
        psd = float(np.linalg.eigvalsh(op.data)[0]) >= -1e-12
        valid = bool(decomposable) and not psd
        reason = "ok" if valid else ("positive semidefinite" if psd else "not decomposable")
    return SubsetWitness(subset, labels, op if valid else None, valid, reason, decomposable)


def restricted_witness(subset: Sequence[int], w: HermitianMatrix | None = None,
                       validity: str = "family",
                       domain: str = "rectangle") -> HermitianMatrix | None:
    """The unit-trace restricted witness, or None for an invalid subset."""
    return evaluate_subset(subset, w, validity, domain, check_decomposable=False).operator


def enumerate_subsets(k: int, w: HermitianMatrix | None = None, exploratory: bool = False,
                      validity: str = "family", domain: str = "rectangle",
                      method: str = "exact", samples: int = 1_000_000, seed=None,
                      resolution: int = 1000) -> list[SubsetWitness]:
    w = derive_witness() if w is None else w
    pool = list(range(35)) if exploratory else support(w)
    out = []
    for combo in itertools.combinations(pool, k):
        sw = evaluate_subset(combo, w, validity, domain)
        if sw.valid:
            sw.fraction = detection_fraction(sw.operator, method, samples, seed, domain,
                                             resolution)
        out.append(sw)
    return out


def fraction_curve(seed=None, w: HermitianMatrix | None = None, exploratory: bool = False,
                   validity: str = "family", domain: str = "rectangle",
                   method: str = "exact", samples: int = 1_000_000,
                   resolution: int = 1000) -> tuple[list[tuple[int, float]], list[SubsetWitness]]:
    """Worst detection fraction among valid restricted witnesses, per subset size.

    Returns the ``(k, worst_fraction)`` rows and every evaluated subset.  A
    size with no valid subset reports ``nan``.
    """
    w = derive_witness() if w is None else w
    kmax = len(support(w))
    rows, details = [], []
    for k in range(1, kmax + 1):
        subs = enumerate_subsets(k, w, exploratory, validity, domain, method, samples,
                                 seed, resolution)
        details.extend(subs)
        fr = [s.fraction for s in subs if s.valid]
        rows.append((k, min(fr) if fr else float("nan")))
    return rows, details


def worst_subsets(details: Sequence[SubsetWitness]) -> dict[int, SubsetWitness]:
    """The valid subset attaining the worst fraction for each size."""
    best: dict[int, SubsetWitness] = {}
    for s in details:
        if not s.valid:
            continue
        k = len(s.subset)
        if k not in best or s.fraction < best[k].fraction:
            best[k] = s
    return best
