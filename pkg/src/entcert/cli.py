"""Command-line front end: ``entcert {certify,sweep,oracle-compare,mub-check,table,basis}``.

Verdicts are data: every successful run exits 0 whatever the verdict.
Invalid configurations and unwritable outputs exit 2.
"""

from __future__ import annotations

import argparse
import json
import sys
from itertools import combinations
from pathlib import Path

import numpy as np

from . import io as eio
from .bases import (
    check_mutually_unbiased,
    computational_basis,
    default_pair_names,
    fourier_basis,
    log2_exact,
    mub_collection_d3,
    mub_collection_d4,
    named_pair,
    parse_pairs,
    sigma_x_basis,
    sigma_y_basis,
    validate_d4_transcription,
)
from .certify import (
    DEFAULT_TRIALS,
    certify_pearson,
    certify_state,
    p_grid,
    sweep,
)
from .errors import EntcertError
from .measure import DEFAULT_N_TOTAL, joint_probabilities, simulate_counts
from .metrics import analytic_mi_sum_rho_c, analytic_mi_sum_werner, mi_sum, pearson_sum, threshold_crossing
from .states import build_state


class UsageError(Exception):
    pass


def _add_state_args(p: argparse.ArgumentParser, need_p: bool = True) -> None:
    p.add_argument("--family", required=True, help="max, class, rho_c, rho_w, rho_a, rho_b, rho_s")
    p.add_argument("--d", type=int, required=True, help="local dimension")
    if need_p:
        p.add_argument("--p", type=float, default=None, help="mixing parameter in [0, 1]")


def _add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--p-start", type=float, default=0.0)
    p.add_argument("--p-stop", type=float, default=1.0)
    p.add_argument("--p-step", type=float, default=0.05)


def _add_output_args(p: argparse.ArgumentParser, default_format: str | None) -> None:
    p.add_argument("--format", choices=("csv", "json"), default=default_format)
    p.add_argument("--out", default=None, help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entcert",
        description="Entanglement certification from mutual information of complementary measurements.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="certify a single state")
    _add_state_args(c)
    c.add_argument("--pairs", default=None, help="comma-separated pair names, e.g. comp,sx")
    c.add_argument("--method", choices=("mi", "pearson"), default="mi")
    c.add_argument("--exact", action="store_true", help="use exact probabilities (no counting noise)")
    c.add_argument("--n-total", type=int, default=DEFAULT_N_TOTAL)
    c.add_argument("--seed", type=int, default=0)
    _add_output_args(c, None)

    s = sub.add_parser("sweep", help="MI sum over a p grid with Monte Carlo bands")
    _add_state_args(s, need_p=False)
    _add_grid_args(s)
    s.add_argument("--pairs", action="append", default=None,
                   help="pair names for one curve; repeat the flag for several curves")
    s.add_argument("--n-total", type=int, default=DEFAULT_N_TOTAL)
    s.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--exact", action="store_true", help="exact tables only, no simulation")
    _add_output_args(s, "csv")

    o = sub.add_parser("oracle-compare", help="numeric MI sums against closed forms")
    _add_state_args(o, need_p=False)
    _add_grid_args(o)
    o.add_argument("--pairs", default=None)
    _add_output_args(o, "csv")

    m = sub.add_parser("mub-check", help="pairwise unbiasedness report")
    m.add_argument("--d", type=int, required=True)
    _add_output_args(m, None)

    t = sub.add_parser("table", help="joint probability or simulated counts table")
    _add_state_args(t)
    t.add_argument("--pairs", required=True, help="a single pair name")
    t.add_argument("--n-total", type=int, default=None, help="simulate counts with this N")
    t.add_argument("--seed", type=int, default=0)
    _add_output_args(t, "csv")

    b = sub.add_parser("basis", help="dump a basis as JSON")
    b.add_argument("--d", type=int, required=True)
    b.add_argument("--name", required=True, help="comp, fourier, sx, sy or mubK")
    b.add_argument("--out", default=None)
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        Path(out).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from exc


def _pairs(names: str | None, d: int):
    pairs = parse_pairs(names or default_pair_names(d), d)
    if len(pairs) < 2:
        raise UsageError("need at least two measurement pairs")
    return pairs


def cmd_certify(args) -> int:
    pairs = _pairs(args.pairs, args.d)
    if args.method == "pearson":
        if len(pairs) != 2:
            raise UsageError("the Pearson criterion takes exactly two pairs")
        res = pearson_sum(build_state(args.family, args.d, args.p), pairs)
        base = certify_pearson(res.sum)
        report = type(base)(
            base.value, base.sigma, base.threshold_ent, base.threshold_max, base.verdict, base.method,
            family=args.family, d=args.d, p=args.p, pair_labels=tuple(x.label for x in pairs),
            per_pair=(res.c_ab, res.c_cd), conjecture=True,
        )
        if not res.canonical:
            print("warning: outcome values 0..d-1 are a non-canonical choice for d > 2", file=sys.stderr)
    else:
        report = certify_state(args.family, args.d, args.p, pairs, exact=args.exact,
                               n_total=args.n_total, seed=args.seed)
    if args.format == "json":
        _emit(eio.dumps(eio.report_document(report)), args.out)
    elif args.format == "csv":
        row = report.to_dict()
        row["pair_labels"] = ";".join(row["pair_labels"])
        cols = list(row)
        _emit(eio.rows_to_csv([row], cols), args.out)
    else:
        lines = [
            f"family      {report.family}  d={report.d}  p={report.p}",
            f"pairs       {', '.join(report.pair_labels)}",
            f"per pair    {', '.join(f'{v:.6f}' for v in report.per_pair)}",
            f"{'MI sum' if report.method.value == 'MI' else 'Pearson sum':<11} "
            f"{report.value:.6f} +- {report.sigma:.6f}",
            f"thresholds  {report.threshold_ent:.6f} (entangled)  {report.threshold_max:.6f} (maximal)",
            f"verdict     {report.verdict.value}" + ("  [conjecture]" if report.conjecture else ""),
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_sweep(args) -> int:
    grid = p_grid(args.p_start, args.p_stop, args.p_step)
    curves = args.pairs or [None]
    records = []
    for names in curves:
        pairs = _pairs(names, args.d)
        records += sweep(args.family, args.d, grid, pairs, n_total=args.n_total,
                         trials=args.trials, seed=args.seed, exact=args.exact)
    seed = None if args.exact else args.seed
    if args.format == "json":
        config = {
            "family": args.family, "d": args.d, "p_start": args.p_start, "p_stop": args.p_stop,
            "p_step": args.p_step, "pairs": curves, "n_total": args.n_total,
            "trials": 0 if args.exact else args.trials, "seed": seed, "exact": args.exact,
        }
        _emit(eio.dumps(eio.sweep_document(records, config, seed)), args.out)
    else:
        _emit(eio.rows_to_csv(eio.sweep_rows(records, seed), eio.SWEEP_COLUMNS), args.out)
    return 0


def cmd_oracle_compare(args) -> int:
    closed = {"rho_c": analytic_mi_sum_rho_c, "rho_w": analytic_mi_sum_werner}
    if args.family not in closed:
        raise UsageError(f"no closed form for family {args.family!r}; use rho_c or rho_w")
    pairs = _pairs(args.pairs, args.d)
    labels = [pr.label for pr in pairs]
    if len(pairs) != 2 or labels[0] != "comp" or labels[1] not in ("fourier", "sx"):
        raise UsageError("closed forms hold for the pairs comp + fourier or comp + sx")
    d, formula = args.d, closed[args.family]

    def numeric(p: float) -> float:
        return mi_sum(build_state(args.family, d, p), pairs).sum

    rows = []
    for p in p_grid(args.p_start, args.p_stop, args.p_step):
        num, ana = numeric(p), formula(d, p)
        rows.append({"family": args.family, "d": d, "p": p, "pair_labels": ";".join(labels),
                     "numeric_sum": num, "analytic_sum": ana, "diff": num - ana})
    max_diff = max(abs(r["diff"]) for r in rows)
    target = float(np.log2(d))
    crossing = threshold_crossing(numeric, target)
    crossing_analytic = threshold_crossing(lambda p: formula(d, p), target)

    if args.format == "json":
        doc = {"schema": "entcert.oracle/1", "family": args.family, "d": d,
               "max_abs_diff": max_diff, "crossing": crossing, "records": rows}
        body = eio.dumps(doc)
    else:
        body = eio.rows_to_csv(rows, eio.ORACLE_COLUMNS)
    _emit(body, args.out)
    summary = sys.stdout if args.out else sys.stderr
    print(f"max |numeric - analytic| = {max_diff:.3e}", file=summary)
    if crossing is None:
        print(f"no crossing of log2(d) = {target:g} strictly inside (0, 1]", file=summary)
    else:
        print(f"crossing of log2(d) = {target:g}: p* = {crossing:.6f} (numeric), "
              f"{crossing_analytic:.6f} (closed form)", file=summary)
    return 0


def _unbiased_matrix(bases) -> tuple[list[str], list[list[float]]]:
    names = [b.label for b in bases]
    mat = [[0.0] * len(bases) for _ in bases]
    for i, j in combinations(range(len(bases)), 2):
        _, dev = check_mutually_unbiased(bases[i], bases[j])
        mat[i][j] = mat[j][i] = dev
    return names, mat


def _format_matrix(names, mat) -> str:
    w = max(len(n) for n in names) + 2
    lines = [" " * w + "".join(f"{n:>12}" for n in names)]
    for n, row in zip(names, mat):
        lines.append(f"{n:<{w}}" + "".join(f"{v:12.3e}" for v in row))
    return "\n".join(lines)


def cmd_mub_check(args) -> int:
    d = args.d
    doc: dict = {"d": d}
    text: list[str] = []
    if d == 3:
        coll = mub_collection_d3()
        names, mat = _unbiased_matrix(coll.bases)
        doc["collections"] = {"d3": {"bases": names, "deviation": mat}}
        text += ["d=3 collection (kets renormalized to 1/sqrt(3))", _format_matrix(names, mat),
                 f"worst deviation {coll.worst_deviation:.3e}: "
                 + ("PASS" if coll.worst_deviation < 1e-10 else "FAIL")]
    elif d == 4:
        reports = validate_d4_transcription()
        doc["transcribed"] = {
            name: {"orthonormal": r.orthonormal, "offending_kets": r.offending_kets,
                   "unbiased_to": r.unbiased_to}
            for name, r in reports.items()
        }
        text.append("transcribed d=4 blocks")
        for name, r in reports.items():
            status = "orthonormal" if r.orthonormal else f"NOT orthonormal, offending ket(s) {r.offending_kets}"
            biased = [o for o, dev in r.unbiased_to.items() if dev >= 1e-10]
            tail = f"not unbiased to {', '.join(biased)}" if biased else "unbiased to all other blocks"
            text.append(f"  {name:<5} {status}; {tail}")
        coll = mub_collection_d4("corrected")
        names, mat = _unbiased_matrix(coll.bases)
        doc["collections"] = {"d4-corrected": {"bases": names, "deviation": mat}}
        text += ["corrected collection (failing blocks replaced by stabilizer eigenbases)",
                 _format_matrix(names, mat),
                 f"worst deviation {coll.worst_deviation:.3e}: "
                 + ("PASS" if coll.worst_deviation < 1e-10 else "FAIL")]
    elif log2_exact(d) and d >= 2:
        n = log2_exact(d)
        bases = [computational_basis(d), fourier_basis(d), sigma_x_basis(n), sigma_y_basis(n)]
        names, mat = _unbiased_matrix(bases)
        doc["collections"] = {"product": {"bases": names, "deviation": mat}}
        text += [f"d={d} computational / Fourier / sigma_x / sigma_y", _format_matrix(names, mat)]
        for i, j in combinations(range(len(bases)), 2):
            verdict = "unbiased" if mat[i][j] < 1e-10 else "not unbiased"
            text.append(f"  {names[i]} vs {names[j]}: {verdict}")
    else:
        raise UsageError(f"mub-check supports d=3, d=4 and powers of two, got d={d}")
    if args.format == "json":
        _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", args.out)
    else:
        _emit("\n".join(text) + "\n", args.out)
    return 0


def cmd_table(args) -> int:
    pair = named_pair(args.pairs, args.d)
    table = joint_probabilities(build_state(args.family, args.d, args.p), pair)
    if args.n_total is not None:
        table = simulate_counts(table, args.n_total, args.seed)
    if args.format == "json":
        _emit(eio.dumps(eio.table_to_dict(table)), args.out)
    else:
        _emit(eio.table_to_csv(table), args.out)
    return 0


def cmd_basis(args) -> int:
    basis = named_pair(args.name, args.d).system1
    _emit(eio.dumps(eio.basis_to_dict(basis)), args.out)
    return 0


COMMANDS = {
    "certify": cmd_certify,
    "sweep": cmd_sweep,
    "oracle-compare": cmd_oracle_compare,
    "mub-check": cmd_mub_check,
    "table": cmd_table,
    "basis": cmd_basis,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, EntcertError, ValueError) as exc:
        print(f"entcert {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
