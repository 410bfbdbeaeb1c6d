"""Linear-inversion tomography over the fifteen two-qubit observables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .measure import LABELS, MeasurementRecord, observables_by_label
from .qmat import DensityMatrix, HermitianMatrix
from .states import fidelity, negativity


class IncompleteRecord(ValueError):
    pass


@dataclass(frozen=True)
class Tomogram:
    rho_est: HermitianMatrix
    repaired: DensityMatrix
    coefficients: dict
    residual: float
    imag_norm: float
    fidelity_vs_target: float | None = None

    def summary(self) -> dict:
        return {
            "fidelity": self.fidelity_vs_target,
            "negativity": negativity_from_tomogram(self),
            "residual": self.residual,
            "imag_norm": self.imag_norm,
        }

    def coefficients_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["label", "coefficient"])
        for lab, v in self.coefficients.items():
            w.writerow([lab, repr(float(v))])
        return buf.getvalue()

    def summary_json(self) -> str:
        return json.dumps(self.summary(), indent=2, sort_keys=True)


def project_to_states(m: HermitianMatrix) -> DensityMatrix:
    """Nearest unit-trace PSD matrix in Frobenius norm.

    Eigenvalues are projected onto the probability simplex (clip below a
    common shift, then renormalize), eigenvectors kept.
    """
    lam, v = np.linalg.eigh(m.data)
    mu = np.sort(lam)[::-1]
    css = np.cumsum(mu) - 1
    ks = np.arange(1, len(mu) + 1)
    r = ks[mu - css / ks > 0][-1]
    shift = css[r - 1] / r
    p = np.clip(lam - shift, 0, None)
    p = p / p.sum()
    return DensityMatrix((v * p) @ v.conj().T, m.dims)


def reconstruct(record: MeasurementRecord, target: HermitianMatrix | None = None) -> Tomogram:
    """rho = I/4 + sum_i (m_i / Tr O_i^2) O_i, then projected to a valid state."""
    values = record.as_dict()
    missing = [lab for lab in LABELS if lab not in values]
    if missing:
        raise IncompleteRecord(f"tomography needs all fifteen observables; missing {missing}")
    obs = observables_by_label()
    data = np.eye(4, dtype=complex) / 4
    coeffs = {"I": 0.25}
    for lab in LABELS:
        o = obs[lab].matrix.data
        a = values[lab] / float(np.trace(o @ o).real)
        coeffs[lab] = a
        data = data + a * o
    est = HermitianMatrix(data, (2, 2))
    rep = project_to_states(est)
    fid = None if target is None else fidelity(target, rep)
    return Tomogram(est, rep, coeffs, float(np.linalg.norm(est.data - rep.data)),
                    float(np.linalg.norm(est.data.imag)), fid)


def negativity_from_tomogram(t: Tomogram) -> float:
    return negativity(t.repaired, "table")
