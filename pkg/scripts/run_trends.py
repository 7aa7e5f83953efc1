"""Reduced-scale run over every p, checking that MLE MSE rises with rho and p and falls with n.

    python scripts/run_trends.py [--replications 500] [--out results/trends.csv]
"""

import argparse
import sys
from pathlib import Path

from liu_mnl.cli import simulation_rows
from liu_mnl.simulation import SimulationGrid, run_grid


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replications", type=int, default=500)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/trends.csv")
    args = ap.parse_args(argv)

    grid = SimulationGrid(replications=args.replications)
    results = run_grid(grid, workers=args.workers)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(simulation_rows(results, grid))

    mse = {r.cell: r.mse_per_estimator["MLE"] for r in results}
    failed = {r.cell: r.failed_replications for r in results}
    for rho in grid.rhos:
        for p in grid.ps:
            row = "  ".join(f"{mse[(rho, p, n)]:>11.4f} ({failed[(rho, p, n)]:>3})" for n in grid.ns)
            print(f"rho={rho:<6} p={p:<3} {row}")

    broken = []
    for p in grid.ps:
        for n in grid.ns:
            seq = [mse[(rho, p, n)] for rho in grid.rhos]
            if any(a >= b for a, b in zip(seq, seq[1:])):
                broken.append(f"rho trend at p={p}, n={n}")
        for rho in grid.rhos:
            seq = [mse[(rho, p, n)] for n in grid.ns]
            if any(a <= b for a, b in zip(seq, seq[1:])):
                broken.append(f"n trend at rho={rho}, p={p}")
    for rho in grid.rhos:
        seq = [mse[(rho, p, grid.ns[0])] for p in grid.ps]
        if any(a >= b for a, b in zip(seq, seq[1:])):
            broken.append(f"p trend at rho={rho}")
    print("trend violations:", broken or "none")
    return 0 if not broken else 1


if __name__ == "__main__":
    sys.exit(main())
