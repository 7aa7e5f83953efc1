"""Multinomial logit model under the reference-category parametrization.

Column order convention used throughout the package: the non-reference
levels come first (in ``Dataset.levels`` order) and the reference level is
the last column of every n x m probability or indicator matrix. Coefficients
are stored as an (m-1) x q array, one row per non-reference level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

LOG_CLAMP = 1e-12
WEIGHT_FLOOR = 1e-10


def _frozen(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Dataset:
    """Design matrix plus categorical response.

    `codes[i]` indexes into `levels`; the last entry of `levels` is the
    reference category. Build from raw labels with :meth:`from_labels`.
    """

    X: np.ndarray
    codes: np.ndarray
    levels: tuple[str, ...]
    columns: tuple[str, ...] = ()

    def __post_init__(self):
        X = _frozen(self.X)
        codes = _frozen(self.codes, dtype=np.intp)
        if X.ndim != 2:
            raise ValueError("X must be two-dimensional")
        n, q = X.shape
        if codes.shape != (n,):
            raise ValueError(f"expected {n} response codes, got shape {codes.shape}")
        if not np.all(np.isfinite(X)):
            raise ValueError("X contains non-finite entries")
        m = len(self.levels)
        if m < 2:
            raise ValueError("need at least two response levels")
        if len(set(self.levels)) != m:
            raise ValueError("response levels must be distinct")
        if n <= q:
            raise ValueError(f"need more observations than columns (n={n}, columns={q})")
        if codes.min() < 0 or codes.max() >= m:
            raise ValueError("response code out of range")
        counts = np.bincount(codes, minlength=m)
        if np.any(counts == 0):
            missing = [self.levels[k] for k in np.flatnonzero(counts == 0)]
            raise ValueError(f"response level(s) never observed: {missing}")
        columns = tuple(self.columns) or tuple(f"X{k + 1}" for k in range(q))
        if len(columns) != q:
            raise ValueError(f"{len(columns)} column names for {q} columns")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "codes", codes)
        object.__setattr__(self, "levels", tuple(self.levels))
        object.__setattr__(self, "columns", columns)

    @classmethod
    def from_labels(
        cls,
        X,
        labels: Sequence,
        reference: str | None = None,
        intercept: bool = False,
        columns: Sequence[str] = (),
    ) -> "Dataset":
        """Encode raw labels; levels sort lexicographically and the reference
        defaults to the lexicographically last level."""
        labels = [str(v).strip() for v in labels]
        observed = sorted(set(labels))
        if reference is None:
            reference = observed[-1]
        reference = str(reference).strip()
        if reference not in observed:
            raise ValueError(f"reference level {reference!r} not among observed levels {observed}")
        levels = tuple(v for v in observed if v != reference) + (reference,)
        index = {v: k for k, v in enumerate(levels)}
        X = np.asarray(X, dtype=float)
        columns = tuple(columns)
        if intercept:
            X = np.column_stack([np.ones(X.shape[0]), X])
            columns = (("(intercept)",) + columns) if columns else ()
        return cls(X=X, codes=np.array([index[v] for v in labels]), levels=levels, columns=columns)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def q(self) -> int:
        """Number of model columns."""
        return self.X.shape[1]

    @property
    def m(self) -> int:
        return len(self.levels)

    @property
    def reference(self) -> str:
        return self.levels[-1]

    @property
    def category_order(self) -> tuple[str, ...]:
        return self.levels[:-1]

    @property
    def indicators(self) -> np.ndarray:
        """n x m one-hot matrix in model column order."""
        Y = np.zeros((self.n, self.m))
        Y[np.arange(self.n), self.codes] = 1.0
        return Y


@dataclass(frozen=True)
class CoefficientSet:
    """(m-1) coefficient vectors; the reference level's vector is implicitly zero."""

    betas: np.ndarray
    category_order: tuple[str, ...] = field(default=())

    def __post_init__(self):
        betas = _frozen(self.betas)
        if betas.ndim != 2 or betas.shape[0] < 1:
            raise ValueError("betas must be a 2-D array with one row per non-reference level")
        if not np.all(np.isfinite(betas)):
            raise ValueError("coefficients must be finite")
        order = tuple(self.category_order) or tuple(str(k + 1) for k in range(betas.shape[0]))
        if len(order) != betas.shape[0]:
            raise ValueError("category_order length does not match number of coefficient vectors")
        object.__setattr__(self, "betas", betas)
        object.__setattr__(self, "category_order", order)

    def __len__(self):
        return self.betas.shape[0]

    def __getitem__(self, j) -> np.ndarray:
        return self.betas[j]


def _betas(coeffs) -> np.ndarray:
    return np.asarray(getattr(coeffs, "betas", coeffs), dtype=float)


def linear_predictors(X, coeffs) -> np.ndarray:
    """n x m matrix of x_i beta_j with a zero reference column appended."""
    X = np.asarray(X, dtype=float)
    B = _betas(coeffs)
    if B.ndim == 1:
        B = B[None, :]
    if X.ndim != 2 or B.shape[1] != X.shape[1]:
        raise ValueError(
            f"dimension mismatch: X has {X.shape[-1]} columns, coefficients have {B.shape[-1]}"
        )
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(B))):
        raise ValueError("non-finite input")
    return np.column_stack([X @ B.T, np.zeros(X.shape[0])])


def softmax_probabilities(X, coeffs) -> np.ndarray:
    """Category probabilities pi_ij, reference in the last column.

    The row maximum is subtracted from the linear predictors before
    exponentiating, so large coefficients do not overflow.
    """
    eta = linear_predictors(X, coeffs)
    eta -= eta.max(axis=1, keepdims=True)
    e = np.exp(eta)
    return e / e.sum(axis=1, keepdims=True)


def _indicator(y, shape) -> np.ndarray:
    y = np.asarray(y)
    if y.ndim == 1:
        if y.shape[0] != shape[0]:
            raise ValueError(f"{y.shape[0]} labels for {shape[0]} probability rows")
        Y = np.zeros(shape)
        Y[np.arange(shape[0]), y.astype(np.intp)] = 1.0
        return Y
    if y.shape != shape:
        raise ValueError(f"indicator shape {y.shape} does not match probabilities {shape}")
    return y.astype(float)


def log_likelihood(pi, y) -> float:
    """sum_i sum_j y_ij log(pi_ij), probabilities clamped to [1e-12, 1 - 1e-12].

    `y` is either the n x m indicator matrix or a vector of integer codes.
    """
    pi = np.asarray(pi, dtype=float)
    Y = _indicator(y, pi.shape)
    logp = np.log(np.clip(pi, LOG_CLAMP, 1.0 - LOG_CLAMP))
    return float(np.sum(Y * logp))


def score(X, y, pi) -> np.ndarray:
    """Gradient of the log-likelihood, one row sum_i (y_ij - pi_ij) x_i per non-reference level."""
    X = np.asarray(X, dtype=float)
    pi = np.asarray(pi, dtype=float)
    if X.shape[0] != pi.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows, probabilities have {pi.shape[0]}")
    Y = _indicator(y, pi.shape)
    return (Y[:, :-1] - pi[:, :-1]).T @ X


def weight_vector(pi, j: int) -> np.ndarray:
    """IRLS weights pi_ij (1 - pi_ij) for category column j, floored at 1e-10."""
    pi = np.asarray(pi, dtype=float)
    if not 0 <= j < pi.shape[1]:
        raise IndexError(f"category index {j} out of range for {pi.shape[1]} categories")
    p = pi[:, j]
    return np.maximum(p * (1.0 - p), WEIGHT_FLOOR)
