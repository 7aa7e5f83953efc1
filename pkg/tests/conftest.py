from pathlib import Path

import numpy as np
import pytest

from liu_mnl.model import Dataset

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


def random_dataset(rng, n=200, p=3, m=3, scale=0.7, rho=0.0):
    """Well-behaved synthetic multinomial data with labels '1'..'m' (reference 'm')."""
    Z = rng.standard_normal((n, p + 1))
    X = np.sqrt(1 - rho**2) * Z[:, :p] + rho * Z[:, p:]
    B = scale * rng.standard_normal((m - 1, p))
    eta = np.column_stack([X @ B.T, np.zeros(n)])
    pi = np.exp(eta - eta.max(axis=1, keepdims=True))
    pi /= pi.sum(axis=1, keepdims=True)
    u = rng.random(n)
    codes = np.minimum((u[:, None] >= np.cumsum(pi, axis=1)).sum(axis=1), m - 1)
    return Dataset(X, codes, tuple(str(k + 1) for k in range(m))), B


def load_collinear_correlation():
    lines = (FIXTURES / "collinear_correlation.csv").read_text().strip().splitlines()
    names = lines[0].split(",")[1:]
    R = np.array([[float(v) for v in line.split(",")[1:]] for line in lines[1:]])
    return names, R


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def collinear():
    return load_collinear_correlation()


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")
