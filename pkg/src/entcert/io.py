"""JSON and CSV (de)serialization for bases, tables, states and sweep records.

Complex numbers are written as ``[re, im]`` pairs.  CSV output is UTF-8,
comma-separated, one header row, ``.`` decimal separator.
"""

from __future__ import annotations

import csv
import io
import json
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .bases import Basis
from .certify import CertificationReport, SweepRecord
from .measure import CountsTable, JointProbTable
from .qcore import DensityMatrix

SWEEP_COLUMNS = (
    "family", "d", "p", "pair_labels", "mi_ab", "mi_cd", "sum", "sigma", "analytic_sum",
    "threshold", "verdict", "exact_sum", "band_lo", "band_hi", "mi_pairs", "trials", "n_total",
    "seed",
)

ORACLE_COLUMNS = ("family", "d", "p", "pair_labels", "numeric_sum", "analytic_sum", "diff")


def _cx(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def _from_cx(rows) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    return a[..., 0] + 1j * a[..., 1]


def basis_to_dict(basis: Basis) -> dict:
    return {
        "dim": basis.dim,
        "label": basis.label,
        "kets": [[_cx(z) for z in ket] for ket in basis.vectors],
    }


def basis_from_dict(doc: dict) -> Basis:
    vectors = _from_cx(doc["kets"])
    if vectors.shape[0] != int(doc["dim"]):
        raise ValueError(f"basis document declares dim={doc['dim']} but has {vectors.shape[0]} kets")
    return Basis(vectors, doc.get("label", ""))


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"local_dim": rho.local_dim, "entries": [[_cx(z) for z in row] for row in rho.matrix]}


def density_from_dict(doc: dict) -> DensityMatrix:
    return DensityMatrix(_from_cx(doc["entries"]), int(doc["local_dim"]))


def load_density_json(path: str | Path) -> DensityMatrix:
    """Raw density matrix ``{"local_dim": d, "entries": [[[re, im], ...], ...]}``."""
    return density_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def table_to_dict(table: JointProbTable | CountsTable) -> dict:
    if isinstance(table, CountsTable):
        return {
            "kind": "counts",
            "labels": list(table.labels),
            "n_nominal": table.n_nominal,
            "seed": table.seed,
            "total": table.total,
            "cells": table.counts.tolist(),
        }
    return {"kind": "probabilities", "labels": list(table.labels), "cells": table.cells.tolist()}


def table_from_dict(doc: dict) -> JointProbTable | CountsTable:
    labels = tuple(doc.get("labels", ("", "")))
    if doc.get("kind") == "counts":
        return CountsTable(np.asarray(doc["cells"], dtype=np.int64), labels,
                           doc.get("n_nominal"), doc.get("seed"))
    return JointProbTable(np.asarray(doc["cells"], dtype=float), labels)


def table_to_csv(table: JointProbTable | CountsTable) -> str:
    """Metadata as ``#`` comment lines, then a header row and one row per system-1 outcome."""
    buf = io.StringIO()
    buf.write(f"# labels={table.labels[0]},{table.labels[1]}\n")
    if isinstance(table, CountsTable):
        buf.write(f"# n_nominal={table.n_nominal}\n# seed={table.seed}\n")
        cells = table.counts
    else:
        cells = table.cells
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a"] + [f"b{k}" for k in range(table.dim)])
    for a, row in enumerate(cells):
        w.writerow([a] + [repr(float(x)) if cells.dtype.kind == "f" else int(x) for x in row])
    return buf.getvalue()


def table_from_csv(text: str) -> JointProbTable | CountsTable:
    meta, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            meta[key] = val
        elif line.strip():
            body.append(line)
    rows = list(csv.reader(body))[1:]
    cells = np.array([[float(x) for x in r[1:]] for r in rows])
    labels = tuple(meta.get("labels", ",").split(",", 1))
    if "n_nominal" in meta:
        n_nominal = None if meta["n_nominal"] == "None" else int(meta["n_nominal"])
        seed = None if meta.get("seed", "None") == "None" else int(meta["seed"])
        return CountsTable(cells.astype(np.int64), labels, n_nominal, seed)
    return JointProbTable(cells, labels)


def _num(x: float | None) -> str:
    return "" if x is None else repr(float(x))


def sweep_rows(records: Sequence[SweepRecord], seed: int | None) -> list[dict]:
    rows = []
    for r in records:
        lo, hi = r.band
        rows.append({
            "family": r.family,
            "d": r.d,
            "p": r.p,
            "pair_labels": ";".join(r.pair_labels),
            "mi_ab": r.mean_per_pair[0],
            "mi_cd": r.mean_per_pair[1],
            "sum": r.mean_sum,
            "sigma": r.sigma,
            "analytic_sum": r.analytic_sum,
            "threshold": r.threshold,
            "verdict": r.verdict.value,
            "exact_sum": r.exact_sum,
            "band_lo": lo,
            "band_hi": hi,
            "mi_pairs": list(r.mean_per_pair),
            "trials": r.trials,
            "n_total": r.n_total,
            "seed": seed if r.trials else None,
        })
    return rows


def rows_to_csv(rows: Iterable[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for c in columns:
            v = row[c]
            if isinstance(v, float) or v is None:
                out.append(_num(v))
            elif isinstance(v, list):
                out.append(";".join(_num(x) for x in v))
            else:
                out.append(str(v))
        w.writerow(out)
    return buf.getvalue()


def sweep_document(records: Sequence[SweepRecord], config: dict, seed: int | None) -> dict:
    return {"schema": "entcert.sweep/1", "config": config, "records": sweep_rows(records, seed)}


def report_document(report: CertificationReport) -> dict:
    return {"schema": "entcert.report/1", "report": report.to_dict()}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def load_schema(name: str) -> dict:
    """Published JSON schema shipped with the package (``sweep``, ``report``, ``oracle``)."""
    text = resources.files("entcert").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)
