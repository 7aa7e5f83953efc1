"""Regenerate tests/fixtures/synthetic_fit.csv and its generating coefficients."""

import json
from pathlib import Path

import numpy as np

OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"
TRUTH = {"A": [0.8, -0.5, 0.3], "B": [-0.4, 0.6, 0.9]}  # reference level "C"


def main(n=1500, seed=20240607):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, 3))
    X[:, 1] = 0.6 * X[:, 0] + 0.8 * X[:, 1]
    eta = np.column_stack([X @ TRUTH["A"], X @ TRUTH["B"], np.zeros(n)])
    pi = np.exp(eta - eta.max(axis=1, keepdims=True))
    pi /= pi.sum(axis=1, keepdims=True)
    u = rng.random(n)
    codes = np.minimum((u[:, None] >= np.cumsum(pi, axis=1)).sum(axis=1), 2)
    labels = np.array(["A", "B", "C"])[codes]
    lines = ["x1,x2,x3,species"] + [f"{a:.6f},{b:.6f},{c:.6f},{y}" for (a, b, c), y in zip(X, labels)]
    (OUT / "synthetic_fit.csv").write_text("\n".join(lines) + "\n")
    (OUT / "synthetic_fit_truth.json").write_text(json.dumps({"reference": "C", "betas": TRUTH}, indent=2) + "\n")


if __name__ == "__main__":
    main()
