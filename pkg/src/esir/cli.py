"""Command-line interface: fit on CSV, simulate, reproduce tables, diagnose.

Exit codes: 0 success, 2 input or validation error, 3 numerical failure.
JSON output carries no timestamps, so identical flags and seed give
byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import sim
from .elliptical import Dataset
from .errors import EsirError, KTooLarge, TooFewPoints
from .metrics import excess_kurtosis, ks_normality, ols_fit
from .sdr import esir_fit, sir_fit


class CliError(Exception):
    """Validation problem; rendered to stderr with exit code 2."""


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return value


def _read_csv(path, response=None, covariates=None, head=None):
    """Parse a CSV into (x, y, covariate_names, response_name).

    First row is the header. With ``response=None`` no response column is
    extracted (y is None). Covariates default to every column whose first
    data value parses as a finite number; once a column is in use, any
    missing or non-numeric cell is an error naming the file line and column.
    """
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            raw = [(lineno, row) for lineno, row in enumerate(csv.reader(handle), start=1) if row]
    except OSError as err:
        raise CliError(f"cannot read {path}: {err}")
    if len(raw) < 2:
        raise CliError(f"{path}: need a header row and at least one data row")
    header = [name.strip() for name in raw[0][1]]
    rows = raw[1:]
    if head is not None:
        rows = rows[:head]

    def resolve(column: str) -> int:
        if column in header:
            return header.index(column)
        try:
            idx = int(column)
        except ValueError:
            raise CliError(f"{path}: no column named {column!r}")
        if not (0 <= idx < len(header)):
            raise CliError(f"{path}: column index {idx} out of range")
        return idx

    response_idx = None if response is None else resolve(response)

    if covariates:
        cov_idx = [resolve(c) for c in covariates]
        if response_idx in cov_idx:
            raise CliError("response column listed among covariates")
    else:
        first = rows[0][1]
        cov_idx = []
        for i in range(len(header)):
            if i == response_idx:
                continue
            if i < len(first):
                try:
                    if np.isfinite(float(first[i])):
                        cov_idx.append(i)
                except ValueError:
                    pass
    if not cov_idx:
        raise CliError(f"{path}: no usable numeric covariate columns")

    used = cov_idx if response_idx is None else cov_idx + [response_idx]

    def cell(lineno, row, i) -> float:
        if i >= len(row) or row[i].strip() == "":
            raise CliError(f"{path}: line {lineno}, column '{header[i]}': missing value")
        try:
            value = float(row[i])
        except ValueError:
            raise CliError(
                f"{path}: line {lineno}, column '{header[i]}': non-numeric value {row[i]!r}"
            )
        if not np.isfinite(value):
            raise CliError(f"{path}: line {lineno}, column '{header[i]}': non-finite value")
        return value

    data = np.array([[cell(lineno, row, i) for i in used] for lineno, row in rows])
    x = data[:, : len(cov_idx)]
    y = data[:, -1] if response_idx is not None else None
    names = [header[i] for i in cov_idx]
    response_name = None if response_idx is None else header[response_idx]
    return x, y, names, response_name


def _write_output(text: str, path: str | None) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
            if not text.endswith("\n"):
                handle.write("\n")
    else:
        print(text)


def _json(payload) -> str:
    return json.dumps(payload, indent=2)


def cmd_fit(args) -> int:
    head = args.head
    covariates = args.covariates.split(",") if args.covariates else None
    x, y, names, response_name = _read_csv(args.input, args.response, covariates, head)
    n, p = x.shape
    if args.H < 2:
        raise CliError("--H must be at least 2")
    if n < 2 * args.H:
        raise CliError(f"need at least 2H={2 * args.H} rows, got {n}")
    if args.K > min(p, args.H - 1):
        raise CliError(f"--K {args.K} exceeds min(p, H-1)={min(p, args.H - 1)}")

    data = Dataset(x, y)
    fit_fn = esir_fit if args.method == "esir" else sir_fit
    fit = fit_fn(data, args.H, args.K)
    projections = x @ fit.directions.T

    report = {
        "method": fit.method,
        "h": fit.h_used,
        "k": fit.k,
        "n": n,
        "response": response_name,
        "covariates": names,
        "eigenvalues": [float(v) for v in fit.eigenvalues],
        "directions": fit.directions.tolist(),
        "standardized_directions": fit.standardized_directions.tolist(),
        "projections": projections.tolist(),
        "ols": None,
    }
    if args.ols_quad:
        features = [projections[:, j] for j in range(fit.k)]
        features += [projections[:, j] ** 2 for j in range(fit.k)]
        features += [
            projections[:, i] * projections[:, j]
            for i in range(fit.k)
            for j in range(i + 1, fit.k)
        ]
        ols = ols_fit(np.column_stack(features), y)
        report["ols"] = {
            "coefficients": ols.coefficients.tolist(),
            "r_squared": ols.r_squared,
            "adjusted_r2": ols.adjusted_r2,
            "f_statistic": ols.f_statistic,
            "dof": list(ols.dof),
            "n_used": ols.n_used,
        }

    if args.format == "json":
        _write_output(_json(report), args.output)
    elif args.format == "csv":
        lines = [",".join(f"proj_{j + 1}" for j in range(fit.k))]
        lines += [",".join(repr(v) for v in row) for row in projections]
        _write_output("\n".join(lines), args.output)
    else:
        lines = [f"method={fit.method} H={fit.h_used} K={fit.k} n={n}"]
        lines.append("eigenvalues: " + " ".join(f"{v:.4f}" for v in fit.eigenvalues))
        for j, row in enumerate(fit.directions):
            lines.append(f"b{j + 1}: " + " ".join(f"{v: .4f}" for v in row))
        if report["ols"]:
            o = report["ols"]
            lines.append(
                f"ols: adjusted_r2={o['adjusted_r2']:.4f} "
                f"f={o['f_statistic']:.2f} dof=({o['dof'][0]},{o['dof'][1]})"
            )
        _write_output("\n".join(lines), args.output)
    return 0


def _summary_line(s: sim.ReplicateSummary) -> str:
    r2 = " ".join(
        f"R2(b{j + 1})={m:.3f}({sd:.3f})" for j, (m, sd) in enumerate(zip(s.r2_mean, s.r2_sd))
    )
    return (
        f"{s.model} {s.dist} {s.method} n={s.n} p={s.p} H={s.h} K={s.k} "
        f"reps={s.rep_count} excluded={s.excluded} {r2} avg={s.avg_r2:.3f}"
    )


def cmd_simulate(args) -> int:
    methods = ("sir", "esir") if args.method == "both" else (args.method,)
    summaries = [
        sim.run_cell(
            args.model,
            args.dist,
            args.n,
            args.p,
            args.H,
            None,
            args.reps,
            method,
            args.seed + 500_000 * i,
        )
        for i, method in enumerate(methods)
    ]
    if args.format == "json":
        _write_output(_json([s.to_record() for s in summaries]), args.output)
    else:
        _write_output("\n".join(_summary_line(s) for s in summaries), args.output)
    return 0


def _table_cells(table: int, reps: int, seed: int) -> tuple[list, str]:
    stride = max(1000, reps)
    cells = []
    idx = 0

    def cell(model, dist, n, p, h, method):
        nonlocal idx
        summary = sim.run_cell(model, dist, n, p, h, None, reps, method, seed + stride * idx)
        idx += 1
        return summary

    if table == 1:
        for model in ("A1", "A2", "A3"):
            for dist in sim.TABLE1_DISTS:
                for method in ("sir", "esir"):
                    cells.append(cell(model, dist, 400, 10, 10, method))
        return cells, "table1"
    if table == 2:
        for n in (120, 200, 400):
            for p in (5, 10, 30):
                for h in (5, 10, 20, 40):
                    for method in ("sir", "esir"):
                        cells.append(cell("B1", "cauchy", n, p, h, method))
        return cells, "table2"
    if table in (3, 4):
        dists = sim.TABLE34_DISTS[:3] if table == 3 else sim.TABLE34_DISTS[3:]
        for model in ("B1", "B2", "B3", "B4"):
            for dist in dists:
                p = 5 if model in ("B2", "B3") else 10
                for method in ("sir", "esir"):
                    cells.append(cell(model, dist, 400, p, 10, method))
        return cells, "table3_4"
    raise CliError(f"unknown table {table}")


def cmd_tables(args) -> int:
    tables = [1, 2, 3, 4] if args.paper else sorted(set(args.table or []))
    if not tables:
        raise CliError("nothing to do: pass --paper or --table N")
    if args.output:
        os.makedirs(args.output, exist_ok=True)
    for table in tables:
        cells, layout = _table_cells(table, args.reps, args.seed)
        text, records = sim.emit_table(cells, layout)
        banner = f"table {table} (reps={args.reps}, seed={args.seed})"
        if args.output:
            base = os.path.join(args.output, f"table{table}")
            with open(base + ".txt", "w", encoding="utf-8") as handle:
                handle.write(banner + "\n" + text + "\n")
            with open(base + ".json", "w", encoding="utf-8") as handle:
                handle.write(_json(records) + "\n")
        else:
            print(banner)
            print(text)
            if args.format == "json":
                print(_json(records))
    return 0


def cmd_converge(args) -> int:
    try:
        n_grid = [int(v) for v in args.n_grid.split(",") if v.strip()]
    except ValueError:
        raise CliError(f"bad --n-grid {args.n_grid!r}")
    oracle_n = args.oracle_n or 10 * max(n_grid)
    try:
        points = sim.convergence_experiment(
            args.model,
            args.dist,
            n_grid,
            lambda n: args.H,
            oracle_n,
            args.reps,
            args.seed,
            args.p,
        )
    except ValueError as err:
        raise CliError(str(err))
    records = [
        {
            "n": pt.n,
            "h": pt.h,
            "mean_error": pt.mean_error,
            "std_error": pt.std_error,
            "reps": pt.reps,
        }
        for pt in points
    ]
    if args.format == "json":
        _write_output(_json(records), args.output)
    else:
        lines = [
            f"n={pt.n} H={pt.h} mean_spectral_error={pt.mean_error:.5f} se={pt.std_error:.5f}"
            for pt in points
        ]
        _write_output("\n".join(lines), args.output)
    return 0


def cmd_diagnose(args) -> int:
    covariates = args.covariates.split(",") if args.covariates else None
    x, _, names, _ = _read_csv(args.input, args.response, covariates, args.head)
    if x.shape[0] < 20:
        raise CliError(f"need at least 20 rows for the normality check, got {x.shape[0]}")
    records = []
    for j, name in enumerate(names):
        stat, reject = ks_normality(x[:, j])
        records.append(
            {
                "column": name,
                "ks_statistic": stat,
                "reject_normal_at_05": bool(reject),
                "excess_kurtosis": excess_kurtosis(x[:, j]),
            }
        )
    if args.format == "json":
        _write_output(_json(records), args.output)
    else:
        header = ["column", "ks_stat", "reject@5%", "excess_kurtosis"]
        rows = [
            [r["column"], f"{r['ks_statistic']:.4f}", str(r["reject_normal_at_05"]), f"{r['excess_kurtosis']:.2f}"]
            for r in records
        ]
        widths = [max(len(row[i]) for row in [header] + rows) for i in range(4)]
        lines = ["  ".join(c.ljust(widths[i]) for i, c in enumerate(row)) for row in [header] + rows]
        _write_output("\n".join(lines), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="esir",
        description="Sufficient dimension reduction for heavy-tailed elliptical covariates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit directions on a CSV file")
    fit.add_argument("--input", required=True)
    fit.add_argument("--response", required=True, help="response column name or 0-based index")
    fit.add_argument("--covariates", help="comma-separated covariate columns (default: all numeric)")
    fit.add_argument("--method", choices=("sir", "esir"), default="esir")
    fit.add_argument("--H", type=_positive_int, default=10)
    fit.add_argument("--K", type=_positive_int, default=1)
    fit.add_argument("--head", type=_positive_int, help="use only the first N data rows")
    fit.add_argument("--ols-quad", action="store_true", help="attach a quadratic OLS report")
    fit.add_argument("--output")
    fit.add_argument("--format", choices=("json", "csv", "text"), default="json")
    fit.set_defaults(func=cmd_fit)

    simulate = sub.add_parser("simulate", help="run one Monte Carlo cell")
    simulate.add_argument("--model", required=True, choices=sim.MODEL_IDS)
    simulate.add_argument("--dist", required=True)
    simulate.add_argument("--n", type=_positive_int, default=400)
    simulate.add_argument("--p", type=_positive_int, default=10)
    simulate.add_argument("--H", type=_positive_int, default=10)
    simulate.add_argument("--reps", type=_positive_int, default=100)
    simulate.add_argument("--method", choices=("sir", "esir", "both"), default="both")
    simulate.add_argument("--seed", type=_seed, default=0)
    simulate.add_argument("--output")
    simulate.add_argument("--format", choices=("json", "text"), default="text")
    simulate.set_defaults(func=cmd_simulate)

    tables = sub.add_parser("tables", help="reproduce the benchmark tables")
    tables.add_argument("--paper", action="store_true", help="run every table grid")
    tables.add_argument("--table", type=int, action="append", choices=(1, 2, 3, 4))
    tables.add_argument("--reps", type=_positive_int, default=100)
    tables.add_argument("--seed", type=_seed, default=0)
    tables.add_argument("--output", help="directory for tableN.txt / tableN.json")
    tables.add_argument("--format", choices=("json", "text"), default="text")
    tables.set_defaults(func=cmd_tables)

    converge = sub.add_parser("converge", help="slice-mean tau convergence experiment")
    converge.add_argument("--model", required=True, choices=sim.MODEL_IDS)
    converge.add_argument("--dist", required=True)
    converge.add_argument("--n-grid", required=True, help="comma-separated ascending sizes")
    converge.add_argument("--H", type=_positive_int, default=10)
    converge.add_argument("--p", type=_positive_int, default=10)
    converge.add_argument("--reps", type=_positive_int, default=50)
    converge.add_argument("--oracle-n", type=_positive_int)
    converge.add_argument("--seed", type=_seed, default=0)
    converge.add_argument("--output")
    converge.add_argument("--format", choices=("json", "text"), default="text")
    converge.set_defaults(func=cmd_converge)

    diagnose = sub.add_parser("diagnose", help="per-column normality and tail report")
    diagnose.add_argument("--input", required=True)
    diagnose.add_argument("--response", help="column to exclude from the report")
    diagnose.add_argument("--covariates", help="comma-separated columns to check")
    diagnose.add_argument("--head", type=_positive_int)
    diagnose.add_argument("--output")
    diagnose.add_argument("--format", choices=("json", "text"), default="text")
    diagnose.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except (TooFewPoints, KTooLarge, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except EsirError as err:
        print(f"numerical failure: {type(err).__name__}: {err}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
