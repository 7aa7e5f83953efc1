"""Monte Carlo comparison of the MLE and the Liu estimators.

Seeding
-------
Every replication owns a 64-bit seed

    rep_seed = stable_mix(master_seed, cell_index, r)

where ``stable_mix`` folds its arguments through SplitMix64 (see
:func:`splitmix64`). The design and the responses of a replication draw from
two independent Philox-4x64 counter-based streams keyed by
``stable_mix(rep_seed, 0)`` and ``stable_mix(rep_seed, 1)``. Normal deviates
are numpy's ``Generator.standard_normal`` on that stream, uniforms are
``Generator.random``. No state is shared between replications, so results do
not depend on how cells are scheduled across workers.
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .irls import FitError, fit_mle
from .linalg import symmetric_eigen
from .liu import liu_estimate, select_d, spectral_summary
from .model import CoefficientSet, Dataset, softmax_probabilities

MASK64 = (1 << 64) - 1
ESTIMATORS = ("MLE", "d1", "d2", "d3")
COEFFICIENT_MODES = ("principal_eigenvector", "equal")
DESIGNS = ("shared_last", "extra_column")


class ConfigError(ValueError):
    pass


class SimulationError(RuntimeError):
    pass


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def stable_mix(*parts: int) -> int:
    """Order-sensitive 64-bit hash: h <- splitmix64(h xor part), starting from h = 0."""
    h = 0
    for part in parts:
        h = splitmix64(h ^ (int(part) & MASK64))
    return h


def rng_from_seed(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed) & MASK64))


@dataclass(frozen=True)
class SimulationGrid:
    rhos: tuple[float, ...] = (0.9, 0.99, 0.999)
    ps: tuple[int, ...] = (4, 8, 12, 20)
    ns: tuple[int, ...] = (100, 200, 500, 1000)
    m: int = 3
    estimators: tuple[str, ...] = ESTIMATORS
    replications: int = 2000
    master_seed: int = 20200101
    coefficient_mode: str = "principal_eigenvector"
    design: str = "shared_last"
    tol: float = 1e-6
    max_iter: int = 5000

    def __post_init__(self):
        for name in ("rhos", "ps", "ns", "estimators"):
            value = getattr(self, name)
            if isinstance(value, (str, bytes)) or not hasattr(value, "__iter__"):
                raise ConfigError(f"{name}: expected a list")
            object.__setattr__(self, name, tuple(value))
        if not self.rhos or not self.ps or not self.ns or not self.estimators:
            raise ConfigError("rhos, ps, ns and estimators must be non-empty")
        for rho in self.rhos:
            if not (isinstance(rho, (int, float)) and 0.0 <= rho < 1.0):
                raise ConfigError(f"rhos: {rho!r} is not in [0, 1)")
        for p in self.ps:
            if not (isinstance(p, int) and p >= 1):
                raise ConfigError(f"ps: {p!r} is not a positive integer")
        for n in self.ns:
            if not isinstance(n, int) or any(n <= p + 5 for p in self.ps):
                raise ConfigError(f"ns: {n!r} must be an integer exceeding every p + 5")
        bad = [e for e in self.estimators if e not in ESTIMATORS]
        if bad:
            raise ConfigError(f"estimators: unknown {bad}; choose from {list(ESTIMATORS)}")
        if not (isinstance(self.m, int) and self.m >= 2):
            raise ConfigError("m: need an integer >= 2")
        if not (isinstance(self.replications, int) and self.replications >= 1):
            raise ConfigError("replications: need an integer >= 1")
        if not (isinstance(self.master_seed, int) and 0 <= self.master_seed <= MASK64):
            raise ConfigError("master_seed: need an unsigned 64-bit integer")
        if self.coefficient_mode not in COEFFICIENT_MODES:
            raise ConfigError(f"coefficient_mode: choose from {list(COEFFICIENT_MODES)}")
        if self.design not in DESIGNS:
            raise ConfigError(f"design: choose from {list(DESIGNS)}")
        if not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ConfigError("tol: need a positive number")
        if not (isinstance(self.max_iter, int) and self.max_iter >= 1):
            raise ConfigError("max_iter: need a positive integer")

    @classmethod
    def from_dict(cls, config: dict) -> "SimulationGrid":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(config) - known)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown field (known: {sorted(known)})")
        return cls(**config)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    def cells(self) -> list[tuple[float, int, int]]:
        """Cartesian product, rho-major then p then n."""
        return list(itertools.product(self.rhos, self.ps, self.ns))


@dataclass(frozen=True)
class CellResult:
    cell: tuple[float, int, int]
    mse_per_estimator: dict[str, float]
    replications: int
    failed_replications: int
    seed_trace: tuple[int, int]
    failure_reasons: dict[str, int] = field(default_factory=dict)

    @property
    def successful(self) -> int:
        return self.replications - self.failed_replications


def generate_design(n: int, p: int, rho: float, seed: int, scheme: str = "shared_last") -> np.ndarray:
    """Correlated covariates x_li = sqrt(1 - rho^2) z_li + rho z_shared.

    ``scheme="shared_last"`` draws n x p normals and shares the last of them,
    so column p is a rescaled copy of z_p. ``scheme="extra_column"`` draws an
    extra (p+1)-th column as the shared term, giving every pair of columns
    correlation rho^2.
    """
    if not 0.0 <= rho < 1.0:
        raise ValueError(f"rho must lie in [0, 1), got {rho}")
    rng = rng_from_seed(seed)
    if scheme == "extra_column":
        z = rng.standard_normal((n, p + 1))
        return math.sqrt(1.0 - rho * rho) * z[:, :p] + rho * z[:, p:]
    if scheme == "shared_last":
        z = rng.standard_normal((n, p))
        return math.sqrt(1.0 - rho * rho) * z + rho * z[:, p - 1 : p]
    raise ValueError(f"unknown design scheme {scheme!r}")


def make_coefficients(p: int, m: int, mode: str = "principal_eigenvector", X=None) -> CoefficientSet:
    """Unit-norm coefficient vector shared by all m-1 non-reference categories."""
    if p < 1:
        raise ValueError("p must be positive")
    if mode == "equal":
        beta = np.full(p, 1.0 / math.sqrt(p))
    elif mode == "principal_eigenvector":
        if X is None:
            raise ValueError("principal_eigenvector mode needs the design matrix")
        X = np.asarray(X, dtype=float)
        beta = symmetric_eigen(X.T @ X).eigenvectors[:, 0]
        beta = beta / np.linalg.norm(beta)
    else:
        raise ValueError(f"unknown coefficient mode {mode!r}")
    return CoefficientSet(np.tile(beta, (m - 1, 1)))


def sample_categories(pi, seed: int) -> np.ndarray:
    """Inverse-CDF draw of one category per row of `pi` from a single uniform each."""
    pi = np.asarray(pi, dtype=float)
    if not np.all(np.isfinite(pi)):
        raise ValueError("non-finite probabilities")
    u = rng_from_seed(seed).random(pi.shape[0])
    cum = np.cumsum(pi, axis=1)
    codes = np.sum(u[:, None] >= cum, axis=1)
    return np.minimum(codes, pi.shape[1] - 1)


def generate_responses(X, coeffs, seed: int) -> np.ndarray:
    """Response codes 0..m-1 (m-1 is the reference) drawn from the logit model."""
    return sample_categories(softmax_probabilities(X, coeffs), seed)


def _replication(rho, p, n, grid: SimulationGrid, rep_seed: int):
    """Squared-error sums per estimator, or the failure reason as a string."""
    X = generate_design(n, p, rho, stable_mix(rep_seed, 0), grid.design)
    truth = make_coefficients(p, grid.m, grid.coefficient_mode, X)
    codes = generate_responses(X, truth, stable_mix(rep_seed, 1))
    if np.any(np.bincount(codes, minlength=grid.m) == 0):
        return "empty_category"
    levels = tuple(str(k + 1) for k in range(grid.m))
    try:
        fit = fit_mle(Dataset(X, codes, levels), max_iter=grid.max_iter, tol=grid.tol)
    except FitError as exc:
        return type(exc).__name__
    if not fit.converged:
        return "not_converged"
    B = fit.coeffs.betas
    errors = {}
    if "MLE" in grid.estimators:
        errors["MLE"] = float(np.sum((B - truth.betas) ** 2))
    rules = [e for e in grid.estimators if e != "MLE"]
    if rules:
        summaries = [spectral_summary(C, b) for C, b in zip(fit.weighted_crossprods, B)]
        for rule in rules:
            total = 0.0
            for j, (C, b) in enumerate(zip(fit.weighted_crossprods, B)):
                est = liu_estimate(b, C, select_d(summaries[j], rule))
                total += float(np.sum((est - truth.betas[j]) ** 2))
            errors[rule] = total
    return errors


def run_cell(cell, grid: SimulationGrid, cell_index: int | None = None) -> CellResult:
    """Average squared estimation error over the grid's replications for one (rho, p, n).

    Replications whose fit fails are counted and dropped from every
    estimator's average alike.
    """
    rho, p, n = cell
    if cell_index is None:
        cell_index = grid.cells().index(tuple(cell))
    sums = {e: 0.0 for e in grid.estimators}
    failures: dict[str, int] = {}
    for r in range(1, grid.replications + 1):
        out = _replication(rho, p, n, grid, stable_mix(grid.master_seed, cell_index, r))
        if isinstance(out, str):
            failures[out] = failures.get(out, 0) + 1
            continue
        for e in grid.estimators:
            sums[e] += out[e]
    failed = sum(failures.values())
    ok = grid.replications - failed
    if ok == 0:
        raise SimulationError(f"cell rho={rho}, p={p}, n={n}: every replication failed {failures}")
    return CellResult(
        cell=(rho, p, n),
        mse_per_estimator={e: sums[e] / ok for e in grid.estimators},
        replications=grid.replications,
        failed_replications=failed,
        seed_trace=(grid.master_seed, cell_index),
        failure_reasons=dict(sorted(failures.items())),
    )


def _run_indexed(args):
    index, cell, grid = args
    try:
        return run_cell(cell, grid, index)
    except SimulationError:
        raise
    except Exception as exc:
        raise SimulationError(f"cell {cell} (index {index}) failed: {exc!r}") from exc


def run_grid(grid: SimulationGrid, workers: int = 1) -> list[CellResult]:
    """Run every cell; output order is rho-major, then p, then n, whatever `workers` is."""
    jobs = [(i, cell, grid) for i, cell in enumerate(grid.cells())]
    if workers <= 1 or len(jobs) == 1:
        return [_run_indexed(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_indexed, jobs))
