"""Command-line front end: states, measurements, detection, tomography, tables.

Every command is deterministic for a given seed.  Exit codes: 0 success,
2 bad arguments or unknown label, 3 solver failure, 4 invalid subset.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import hybrid23, measure, states, tomo, witness
from .sdp import DEFAULT_TOL, SolverError

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_INVALID_SUBSET = 4

HYBRID_ORDER = ("b11", "b22", "b33", "v8")

log = logging.getLogger("entwit")


class UsageError(ValueError):
    pass


def _state(label: str):
    try:
        return states.from_label(label)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _is_hybrid(rho) -> bool:
    return rho.dims == (2, 3)


def default_order(rho) -> list[str]:
    if _is_hybrid(rho):
        rest = [lab for lab in hybrid23.bloch_labels() if lab not in HYBRID_ORDER]
        return list(HYBRID_ORDER) + rest
    return list(measure.LABELS)


def _operators(rho):
    return hybrid23.bloch_operator_dict() if _is_hybrid(rho) else None


def _write(text: str, out: str | None):
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float) and math.isnan(x):
        return "nan"
    text = f"{x:.6f}"
    return "0.000000" if text == "-0.000000" else text


# --------------------------------------------------------------------------
# commands as functions returning data

def cmd_state(label: str) -> dict:
    rho = _state(label)
    return {
        "label": label,
        "dims": list(rho.dims),
        "negativity_table": states.negativity(rho, "table"),
        "negativity_trace_norm": states.negativity(rho, "trace_norm"),
        "matrix": rho.to_dict(),
    }


def cmd_measure(label: str, sigma: float, seed, labels=None) -> measure.MeasurementRecord:
    rho = _state(label)
    labels = labels or default_order(rho)
    return measure.measure_noisy(rho, labels, sigma, seed, operators=_operators(rho))


def cmd_detect(label: str | None, sigma: float, seed, order=None, tol: float = DEFAULT_TOL,
               record: measure.MeasurementRecord | None = None) -> dict:
    if record is not None:
        order = order or list(record.labels)
        two_qubit = all(lab in measure.LABELS for lab in order)
        ops = None if two_qubit else hybrid23.bloch_operator_dict()
        res = witness.adaptive_detect(record, order, tol=tol, operators=ops)
    else:
        rho = _state(label)
        order = order or default_order(rho)
        res = witness.adaptive_detect(rho, order, sigma, seed, tol, operators=_operators(rho))
    out = {"state": label, "sigma": sigma, "seed": seed}
    out.update(res.to_dict())
    return out


def _table2_task(task):
    label, seed, sigma, tol = task
    rho = states.from_label(label)
    rec = measure.measure_noisy(rho, measure.LABELS, sigma, seed)
    det = witness.adaptive_detect(rec, measure.LABELS, tol=tol)
    t = tomo.reconstruct(rec, target=rho)
    return (tomo.negativity_from_tomogram(t), t.fidelity_vs_target,
            det.verdict == "entangled", det.measurements_used, det.final.objective)


TABLE2_COLUMNS = ["state", "theory_negativity", "exp_negativity_mean", "exp_negativity_std",
                  "fidelity_mean", "detection_rate", "verdict", "measurements_used_mean",
                  "objective_mean"]


def cmd_table2(sigma: float = measure.DEFAULT_SIGMA, seed: int = 42, repeats: int = 1,
               tol: float = DEFAULT_TOL, jobs: int = 1, out: str | None = None,
               labels=None) -> list[dict]:
    """One row per two-qubit state; noisy quantities averaged over ``repeats`` seeds.

    Repeat ``r`` of the ``i``-th state of the full table draws its noise from
    seed ``[seed, i, r]``, so restricting ``labels`` does not change any row.
    One record of all fifteen values feeds both detection and tomography.
    """
    all_labels = states.state_labels()
    labels = list(labels or all_labels)
    unknown = [lab for lab in labels if lab not in all_labels]
    if unknown:
        raise UsageError(f"table2 covers {all_labels}; got {unknown}")
    tasks = [(lab, [seed, all_labels.index(lab), r], sigma, tol)
             for lab in labels for r in range(repeats)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_table2_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [_table2_task(t) for t in tasks]
    rows = []
    for i, lab in enumerate(labels):
        chunk = np.array(results[i * repeats:(i + 1) * repeats], dtype=float)
        neg, fid, hit, used, obj = chunk.T
        rate = float(hit.mean())
        rows.append({
            "state": lab,
            "theory_negativity": states.negativity(states.from_label(lab), "table"),
            "exp_negativity_mean": float(neg.mean()),
            "exp_negativity_std": float(neg.std()),
            "fidelity_mean": float(fid.mean()),
            "detection_rate": rate,
            "verdict": "entangled" if rate >= 0.5 else "not_detected",
            "measurements_used_mean": float(used.mean()),
            "objective_mean": float(obj.mean()),
        })
    if out:
        _write(table2_csv(rows), out)
    return rows


def table2_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE2_COLUMNS)
    for r in rows:
        w.writerow([r[c] if isinstance(r[c], str) else _fmt(r[c]) for c in TABLE2_COLUMNS])
    return buf.getvalue()


def _witness_choice(name: str):
    if name == "derived":
        return hybrid23.derive_witness()
    if name == "printed":
        return hybrid23.printed_witness()
    raise UsageError(f"unknown witness {name!r}")


def cmd_fig4(domain: str = "rectangle", method: str = "exact", samples: int = 1_000_000,
             seed: int = 42, resolution: int = 1000, validity: str = "family",
             exploratory: bool = False, witness_name: str = "derived",
             surface_points: int = 51, out: str | None = None) -> dict[str, str]:
    """Build the fig4 CSV files; returns {filename: content}, also written under ``out``."""
    w = _witness_choice(witness_name)
    rows, details = hybrid23.fraction_curve(seed, w, exploratory, validity, domain, method,
                                            samples, resolution)
    worst = hybrid23.worst_subsets(details)
    files = {}

    buf = io.StringIO()
    cw = csv.writer(buf, lineterminator="\n")
    cw.writerow(["k", "subset", "valid", "decomposable", "fraction", "reason"])
    for s in details:
        cw.writerow([len(s.subset), " ".join(s.labels), int(s.valid),
                     "" if s.decomposable is None else int(s.decomposable),
                     _fmt(s.fraction), s.reason])
    files["fig4_subsets.csv"] = buf.getvalue()

    buf = io.StringIO()
    cw = csv.writer(buf, lineterminator="\n")
    cw.writerow(["k", "worst_fraction", "worst_subset"])
    for k, f in rows:
        cw.writerow([k, _fmt(f), " ".join(worst[k].labels) if k in worst else ""])
    files["fig4_curve.csv"] = buf.getvalue()

    alphas = np.linspace(0, hybrid23.ALPHA_MAX, surface_points)
    gammas = np.linspace(0, hybrid23.GAMMA_MAX, surface_points)
    A, G = np.meshgrid(alphas, gammas, indexing="ij")
    surfaces = {"W": w}
    roman = {1: "I", 2: "II", 3: "III"}
    for k, s in worst.items():
        if k in roman:
            surfaces[f"W_{roman[k]}"] = s.operator
    for name, op in surfaces.items():
        z = hybrid23.trace_surface(op, A, G)
        buf = io.StringIO()
        cw = csv.writer(buf, lineterminator="\n")
        cw.writerow(["alpha", "gamma", "trace_value"])
        for a, g, v in zip(A.ravel(), G.ravel(), z.ravel()):
            cw.writerow([_fmt(float(a)), _fmt(float(g)), _fmt(float(v))])
        files[f"surface_{name}.csv"] = buf.getvalue()
    if out:
        d = Path(out)
        d.mkdir(parents=True, exist_ok=True)
        for fname, text in files.items():
            (d / fname).write_text(text)
    return files


# --------------------------------------------------------------------------
# argument parsing

def _labels_arg(text: str | None):
    if not text:
        return None
    return [s.strip() for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="entwit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def noise(sp, sigma=measure.DEFAULT_SIGMA):
        sp.add_argument("--sigma", type=float, default=sigma)
        sp.add_argument("--seed", type=int, default=42)

    sp = sub.add_parser("state", help="write a state's density matrix and negativity")
    sp.add_argument("label")
    sp.add_argument("--out", help="matrix JSON path (default: embed in stdout report)")
    sp.add_argument("--convention", choices=states.CONVENTIONS, default=None,
                    help="print only this negativity convention")

    sp = sub.add_parser("measure", help="simulate expectation values")
    sp.add_argument("label")
    noise(sp)
    sp.add_argument("--labels", help="comma-separated observable labels")
    sp.add_argument("--out")

    sp = sub.add_parser("detect", help="adaptive SDP entanglement detection")
    sp.add_argument("label", nargs="?")
    noise(sp)
    sp.add_argument("--order", help="comma-separated measurement order")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--record", help="MeasurementRecord JSON to use instead of simulating")
    sp.add_argument("--out")

    sp = sub.add_parser("table2", help="detection table for all twenty two-qubit states")
    noise(sp)
    sp.add_argument("--repeats", type=int, default=1, help="number of noise seeds per state")
    sp.add_argument("--tol", type=float, default=DEFAULT_TOL)
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--states", help="comma-separated subset of rows, e.g. 'E1,E2'")
    sp.add_argument("--out")

    sp = sub.add_parser("tomo", help="linear-inversion tomography of a simulated record")
    sp.add_argument("label", nargs="?")
    noise(sp)
    sp.add_argument("--record", help="MeasurementRecord JSON to use instead of simulating")
    sp.add_argument("--out", help="coefficient CSV path")
    sp.add_argument("--summary", help="summary JSON path (default: stdout)")

    sp = sub.add_parser("fig4", help="qubit-qutrit detection fractions and surfaces")
    sp.add_argument("--domain", choices=hybrid23.DOMAINS, default="rectangle")
    sp.add_argument("--physical", action="store_const", const="physical", dest="domain")
    sp.add_argument("--method", choices=("exact", "grid", "montecarlo"), default="exact")
    sp.add_argument("--samples", type=int, default=1_000_000)
    sp.add_argument("--resolution", type=int, default=1000)
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--validity", choices=hybrid23.VALIDITY_RULES, default="family")
    sp.add_argument("--exploratory", action="store_true",
                    help="draw subsets from all 35 coefficients")
    sp.add_argument("--witness", choices=("derived", "printed"), default="derived")
    sp.add_argument("--subset", help="evaluate one subset, e.g. 'b11,v8'")
    sp.add_argument("--out", default=".", help="output directory")
    return p


def _check_config(args):
    if getattr(args, "sigma", 0) < 0:
        raise UsageError("--sigma must be >= 0")
    if getattr(args, "tol", 1) <= 0:
        raise UsageError("--tol must be > 0")
    for name in ("samples", "repeats", "jobs", "resolution"):
        if getattr(args, name, 1) < 1:
            raise UsageError(f"--{name} must be >= 1")


def _load_record(path):
    try:
        return measure.MeasurementRecord.from_json(Path(path).read_text())
    except (OSError, KeyError, ValueError) as exc:
        raise UsageError(f"cannot read record {path}: {exc}") from exc


def run(args) -> int:
    _check_config(args)
    if args.command == "state":
        rep = cmd_state(args.label)
        if args.out:
            _write(json.dumps(rep["matrix"]), args.out)
            del rep["matrix"]
        if args.convention:
            rep.pop("negativity_trace_norm" if args.convention == "table" else "negativity_table")
        print(json.dumps(rep, indent=2))
    elif args.command == "measure":
        rec = cmd_measure(args.label, args.sigma, args.seed, _labels_arg(args.labels))
        _write(rec.to_json(indent=2) + "\n", args.out)
    elif args.command == "detect":
        record = _load_record(args.record) if args.record else None
        if record is None and not args.label:
            raise UsageError("detect needs a state label or --record")
        rep = cmd_detect(args.label, args.sigma, args.seed, _labels_arg(args.order), args.tol,
                         record)
        _write(json.dumps(rep, indent=2) + "\n", args.out)
    elif args.command == "table2":
        rows = cmd_table2(args.sigma, args.seed, args.repeats, args.tol, args.jobs,
                          labels=_labels_arg(args.states))
        _write(table2_csv(rows), args.out)
    elif args.command == "tomo":
        if args.record:
            rec, target = _load_record(args.record), None
            if args.label:
                target = _state(args.label)
        elif args.label:
            target = _state(args.label)
            if target.dims != (2, 2):
                raise UsageError("tomography is implemented for two-qubit states only")
            rec = measure.measure_noisy(target, measure.LABELS, args.sigma, args.seed)
        else:
            raise UsageError("tomo needs a state label or --record")
        try:
            t = tomo.reconstruct(rec, target)
        except tomo.IncompleteRecord as exc:
            raise UsageError(str(exc)) from exc
        if args.out:
            _write(t.coefficients_csv(), args.out)
        _write(t.summary_json() + "\n", args.summary)
    elif args.command == "fig4":
        if args.subset:
            return _fig4_subset(args)
        files = cmd_fig4(args.domain, args.method, args.samples, args.seed, args.resolution,
                         args.validity, args.exploratory, args.witness, out=args.out)
        sys.stdout.write(files["fig4_curve.csv"])
    return EXIT_OK


def _fig4_subset(args) -> int:
    names = hybrid23.bloch_labels()
    try:
        idx = [names.index(s) for s in _labels_arg(args.subset)]
    except ValueError as exc:
        raise UsageError(f"unknown coefficient label in {args.subset!r}") from exc
    w = _witness_choice(args.witness)
    sw = hybrid23.evaluate_subset(idx, w, args.validity, args.domain)
    if sw.valid:
        sw.fraction = hybrid23.detection_fraction(sw.operator, args.method, args.samples,
                                                  args.seed, args.domain, args.resolution)
    print(json.dumps({"subset": list(sw.labels), "valid": sw.valid, "reason": sw.reason,
                      "decomposable": sw.decomposable, "fraction": sw.fraction}, indent=2))
    return EXIT_OK if sw.valid else EXIT_INVALID_SUBSET


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except UsageError as exc:
        print(f"entwit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SolverError as exc:
        print(f"entwit: solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
