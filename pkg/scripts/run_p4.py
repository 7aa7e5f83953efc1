"""Simulate the p = 4 grid and compare the MLE column with reference values.

    python scripts/run_p4.py [--replications R] [--workers W] [--out results/p4.csv]
"""

import argparse
import sys
import time
from pathlib import Path

from liu_mnl.cli import simulation_charts, simulation_rows
from liu_mnl.simulation import SimulationGrid, run_grid

REFERENCE_MLE = {
    0.9: (7.6023, 2.7658, 1.5937, 1.1544),
    0.99: (65.297, 20.7964, 8.8854, 4.9233),
    0.999: (621.8735, 218.5666, 85.5395, 44.3507),
}
NS = (100, 200, 500, 1000)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--replications", type=int, default=2000)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--coefficient-mode", default="principal_eigenvector")
    ap.add_argument("--design", default="shared_last")
    ap.add_argument("--out", default="results/p4.csv")
    args = ap.parse_args(argv)

    grid = SimulationGrid(
        ps=(4,), replications=args.replications,
        coefficient_mode=args.coefficient_mode, design=args.design,
    )
    t0 = time.time()
    results = run_grid(grid, workers=args.workers)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(simulation_rows(results, grid))
    (out.parent / f"{out.stem}_p4.svg").write_text(simulation_charts(results, grid)[4])

    print(f"{'rho':>6} {'n':>5} {'MLE':>10} {'reference':>10} {'ratio':>6} {'d1':>9} {'d2':>9} {'d3':>9}  failed")
    outside = 0
    for res in results:
        rho, _, n = res.cell
        mse = res.mse_per_estimator
        ref = REFERENCE_MLE[rho][NS.index(n)]
        ratio = mse["MLE"] / ref
        outside += not 0.75 <= ratio <= 1.25
        print(
            f"{rho:>6} {n:>5} {mse['MLE']:>10.4f} {ref:>10.4f} {ratio:>6.3f} "
            f"{mse['d1']:>9.4f} {mse['d2']:>9.4f} {mse['d3']:>9.4f}  {res.failed_replications}"
        )
    print(f"{outside} of {len(results)} cells outside +-25%; {time.time() - t0:.0f}s; rows in {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
