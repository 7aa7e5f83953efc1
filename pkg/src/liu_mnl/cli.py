"""Command-line entry point: ``liu-mnl fit | simulate | diagnose``.

Exit codes: 0 success, 1 usage or input error, 2 the MLE did not converge.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import charts
from .irls import FitError, fit_mle
from .linalg import condition_number, correlation_matrix, multicollinearity_level
from .liu import liu_scalar_mse, parse_rule, spectral_summary
from .model import Dataset
from .report import build_report, format_report
from .simulation import ConfigError, SimulationError, SimulationGrid, run_grid

EXIT_OK, EXIT_INPUT, EXIT_NOT_CONVERGED = 0, 1, 2
SIM_COLUMNS = ("rho", "p", "n", "estimator", "mse", "replications", "failed", "master_seed")


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def read_csv(path, response: str | None = None):
    """Return (column names, covariate matrix, response labels or None)."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"{path}: no such file")
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise InputError(f"{path}: cannot read CSV ({exc})") from None
    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header row and at least one data row")
    header = [h.strip() for h in rows[0]]
    if len(set(header)) != len(header):
        raise InputError(f"{path}: duplicate column names in header")
    if response is not None and response not in header:
        raise InputError(f"{path}: unknown response column {response!r} (columns: {', '.join(header)})")
    covariates = [h for h in header if h != response]
    if not covariates:
        raise InputError(f"{path}: no covariate columns")
    X = np.empty((len(rows) - 1, len(covariates)))
    labels = []
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise InputError(f"{path}: line {line} has {len(row)} fields, header has {len(header)}")
        k = 0
        for name, cell in zip(header, row):
            if name == response:
                labels.append(cell.strip())
                continue
            try:
                X[i, k] = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}: line {line}, column {name!r}: non-numeric value {cell.strip()!r}"
                ) from None
            if not np.isfinite(X[i, k]):
                raise InputError(f"{path}: line {line}, column {name!r}: non-finite value")
            k += 1
    return covariates, X, (labels if response is not None else None)


def _load_dataset(args) -> Dataset:
    columns, X, labels = read_csv(args.input, args.response)
    try:
        return Dataset.from_labels(
            X, labels, reference=None if args.reference in (None, "last") else args.reference,
            intercept=args.intercept, columns=columns,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _write_text(path, text: str):
    path = Path(path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from None


def _mse_curves(report, fit, grid_size=101):
    d_grid = np.linspace(0.0, 1.0, grid_size)
    curves = {}
    for cat, C, b in zip(report.categories, fit.weighted_crossprods, fit.coeffs.betas):
        s = spectral_summary(C, b)
        curves[cat.level] = [(float(d), liu_scalar_mse(s.eigenvalues, s.alpha, d)) for d in d_grid]
    return curves


def _write_plots(directory, report, fit):
    directory = Path(directory)
    curves = _mse_curves(report, fit)
    rows = ["level,d,mse"] + [f"{lvl},{d!r},{v!r}" for lvl, pts in curves.items() for d, v in pts]
    _write_text(directory / "mse_vs_d.csv", "\n".join(rows) + "\n")
    _write_text(
        directory / "mse_vs_d.svg",
        charts.line_chart(curves, "Estimated MSE against the biasing parameter d", "d", "estimated MSE", log_y=True),
    )
    groups = {c.level: {name: blk.scalar_mse for name, blk in c.estimates.items()} for c in report.categories}
    _write_text(directory / "mse_by_estimator.svg", charts.bar_chart(groups, "Estimated MSE per level", "estimated MSE"))


def cmd_fit(args) -> int:
    data = _load_dataset(args)
    try:
        fit = fit_mle(data, max_iter=args.max_iter, tol=args.tol)
        report = build_report(
            data, fit, args.estimator, args.d_rule if args.estimator == "liu" else None,
            response=args.response, intercept=args.intercept, max_iter=args.max_iter,
        )
    except (FitError, np.linalg.LinAlgError) as exc:
        raise InputError(f"fit failed: {exc}") from None
    _write_text(args.output, report.to_json())
    if args.plots:
        _write_plots(args.plots, report, fit)
    sys.stdout.write(format_report(report))
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def load_config(path) -> SimulationGrid:
    try:
        config = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(config, dict):
        raise InputError(f"{path}: top level must be an object")
    seed = os.environ.get("LIU_MNL_SEED")
    if seed:
        try:
            config["master_seed"] = int(seed, 0)
        except ValueError:
            raise InputError(f"LIU_MNL_SEED={seed!r} is not an integer") from None
    try:
        return SimulationGrid.from_dict(config)
    except (ConfigError, TypeError) as exc:
        raise InputError(f"{path}: invalid config: {exc}") from None


def simulation_rows(results, grid: SimulationGrid) -> str:
    lines = [",".join(SIM_COLUMNS)]
    for res in results:
        rho, p, n = res.cell
        for est in grid.estimators:
            lines.append(
                f"{rho!r},{p},{n},{est},{res.mse_per_estimator[est]!r},"
                f"{res.replications},{res.failed_replications},{grid.master_seed}"
            )
    return "\n".join(lines) + "\n"


def simulation_charts(results, grid: SimulationGrid) -> dict[int, str]:
    """One log-scale chart of MSE against n per p; colour by estimator, dash by rho."""
    out = {}
    for p in grid.ps:
        series, styles = {}, {}
        for a, rho in enumerate(grid.rhos):
            for b, est in enumerate(grid.estimators):
                label = f"{est}, rho={rho:g}"
                series[label] = [
                    (r.cell[2], r.mse_per_estimator[est]) for r in results if r.cell[0] == rho and r.cell[1] == p
                ]
                styles[label] = (charts.PALETTE[b % len(charts.PALETTE)], charts.DASHES[a % len(charts.DASHES)])
        out[p] = charts.line_chart(
            series, f"Simulated MSE, p = {p}", "sample size n", "MSE (log scale)", log_x=True, styles=styles
        )
    return out


def cmd_simulate(args) -> int:
    grid = load_config(args.config)
    out = Path(args.out)
    _write_text(out, "")  # fail early on an unwritable path
    try:
        results = run_grid(grid, workers=args.workers)
    except SimulationError as exc:
        raise InputError(str(exc)) from None
    _write_text(out, simulation_rows(results, grid))
    meta = {
        "grid": grid.to_dict(),
        "cells": [
            {
                "rho": r.cell[0], "p": r.cell[1], "n": r.cell[2], "cell_index": r.seed_trace[1],
                "failed": r.failed_replications, "failure_reasons": r.failure_reasons,
            }
            for r in results
        ],
        "notes": [
            "m, the coefficient mode and the covariate design are not fixed by the source study; "
            "the values used are recorded under 'grid'.",
            "mse divides by replications - failed; failed replications are dropped for every estimator.",
        ],
    }
    _write_text(out.with_name(out.name + ".meta.json"), json.dumps(meta, indent=2) + "\n")
    chart_dir = Path(args.charts) if args.charts else out.parent
    for p, svg in simulation_charts(results, grid).items():
        _write_text(chart_dir / f"{out.stem}_p{p}.svg", svg)
    print(f"wrote {len(results) * len(grid.estimators)} rows to {out}")
    return EXIT_OK


def _format_matrix(names, R, digits=4) -> str:
    width = max(digits + 4, *(len(n) for n in names)) + 2
    lines = ["".ljust(width) + "".join(n.rjust(width) for n in names)]
    for i, name in enumerate(names):
        cells = ["".rjust(width) if j < i else f"{R[i, j]:.{digits}f}".rjust(width) for j in range(len(names))]
        lines.append(name.ljust(width) + "".join(cells))
    return "\n".join(lines)


def cmd_diagnose(args) -> int:
    columns, X, labels = read_csv(args.input, args.response)
    try:
        R = correlation_matrix(X)
        cn = condition_number(R)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise InputError(str(exc)) from None
    print("Correlation matrix of the covariates")
    print(_format_matrix(columns, R))
    print(f"\ncondition number: {cn:.3f} ({multicollinearity_level(cn)} multicollinearity)")
    if labels is None:
        return EXIT_OK
    data = _load_dataset(args)
    try:
        fit = fit_mle(data, max_iter=args.max_iter, tol=args.tol)
    except FitError as exc:
        raise InputError(f"fit failed: {exc}") from None
    print(f"\nMLE {'converged' if fit.converged else 'did NOT converge'} after {fit.iterations} iterations")
    for k, (level, C) in enumerate(zip(data.category_order, fit.weighted_crossprods), start=1):
        s = spectral_summary(C, fit.coeffs.betas[k - 1])
        try:
            cn_j = condition_number(C)
            flag = multicollinearity_level(cn_j)
        except ValueError:
            cn_j, flag = float("inf"), "strong"
        eig = ", ".join(f"{v:.6g}" for v in s.eigenvalues)
        print(f"level {level!r}: eigenvalues of X'W_jX: {eig}")
        print(f"  CN{k} = {cn_j:.3f} ({flag} multicollinearity)")
    return EXIT_OK if fit.converged else EXIT_NOT_CONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="liu-mnl", description="Multinomial logit MLE and Liu estimators.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    fit = sub.add_parser("fit", help="fit a dataset and write a JSON report")
    fit.add_argument("--input", required=True)
    fit.add_argument("--response", required=True)
    fit.add_argument("--reference", default=None, help="reference level (default: lexicographically last)")
    fit.add_argument("--estimator", choices=("mle", "liu"), default="mle")
    fit.add_argument("--d-rule", default="d3", help="d1, d2, d3 or fixed:<value>")
    fit.add_argument("--intercept", action="store_true")
    fit.add_argument("--tol", type=float, default=1e-6)
    fit.add_argument("--max-iter", type=int, default=100)
    fit.add_argument("--output", required=True)
    fit.add_argument("--plots", default=None, help="directory for MSE-vs-d CSV/SVG output")
    fit.set_defaults(func=cmd_fit)

    sim = sub.add_parser("simulate", help="run the Monte Carlo grid")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--charts", default=None, help="directory for SVG charts (default: next to --out)")
    sim.set_defaults(func=cmd_simulate)

    diag = sub.add_parser("diagnose", help="correlation matrix and condition numbers")
    diag.add_argument("--input", required=True)
    diag.add_argument("--response", default=None)
    diag.add_argument("--reference", default=None)
    diag.add_argument("--intercept", action="store_true")
    diag.add_argument("--tol", type=float, default=1e-6)
    diag.add_argument("--max-iter", type=int, default=100)
    diag.set_defaults(func=cmd_diagnose)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fit" and args.estimator == "liu":
        try:
            parse_rule(args.d_rule)
        except ValueError as exc:
            print(f"liu-mnl: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(f"liu-mnl: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
