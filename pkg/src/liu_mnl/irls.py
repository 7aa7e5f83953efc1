"""Maximum likelihood fitting by per-category iteratively re-weighted least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import NotPositiveDefiniteError, _cholesky_solve, inverse_spd
from .model import WEIGHT_FLOOR, CoefficientSet, Dataset, softmax_probabilities, weight_vector

DIVERGENCE_BOUND = 1e8


class FitError(RuntimeError):
    pass


class MulticollinearityError(FitError):
    """A weighted cross-product X'W_jX was numerically singular."""


class SeparationError(FitError):
    """Coefficients ran off to infinity (quasi- or complete separation)."""


@dataclass(frozen=True)
class MleFit:
    coeffs: CoefficientSet
    weighted_crossprods: tuple[np.ndarray, ...]
    weights: np.ndarray
    iterations: int
    converged: bool
    final_delta: float
    tol: float = 1e-6


def working_response(eta_j, y_j, pi_j) -> np.ndarray:
    """z_j = eta_j + (y_j - pi_j) / (pi_j (1 - pi_j))."""
    pi_j = np.asarray(pi_j, dtype=float)
    w = np.maximum(pi_j * (1.0 - pi_j), WEIGHT_FLOOR)
    return np.asarray(eta_j, dtype=float) + (np.asarray(y_j, dtype=float) - pi_j) / w


def _probabilities(X, B):
    # softmax_probabilities without input checks, for the inner loop
    eta = np.empty((X.shape[0], B.shape[0] + 1))
    eta[:, :-1] = X @ B.T
    eta[:, -1] = 0.0
    eta -= eta.max(axis=1, keepdims=True)
    np.exp(eta, out=eta)
    eta /= eta.sum(axis=1, keepdims=True)
    return eta


def _crossprod(X, w):
    C = X.T @ (w[:, None] * X)
    return 0.5 * (C + C.T)


def fit_mle(data: Dataset, max_iter: int = 100, tol: float = 1e-6) -> MleFit:
    """Fit the multinomial logit MLE.

    Starts from zero. Each pass updates every non-reference category with
    ``beta_j += (X'W_jX)^-1 X'(y_j - pi_j)`` using probabilities from the
    start of the pass, then refreshes all probabilities jointly. Stops when
    the largest absolute coefficient change drops below `tol`.

    A non-converged fit is returned with ``converged=False``; a singular
    cross-product raises MulticollinearityError and coefficients beyond
    1e8 in magnitude raise SeparationError.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    X = data.X
    Y = data.indicators
    k = data.m - 1
    B = np.zeros((k, data.q))
    delta = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        pi = _probabilities(X, B)
        resid = Y - pi
        step = np.empty_like(B)
        for j in range(k):
            w = np.maximum(pi[:, j] * (1.0 - pi[:, j]), WEIGHT_FLOOR)
            try:
                step[j] = _cholesky_solve(_crossprod(X, w), X.T @ resid[:, j])
            except NotPositiveDefiniteError as exc:
                raise MulticollinearityError(
                    f"X'W_jX singular for level {data.levels[j]!r} at iteration {iterations}: {exc}"
                ) from None
        B = B + step
        delta = float(np.max(np.abs(step)))
        if not np.all(np.isfinite(B)) or np.max(np.abs(B)) > DIVERGENCE_BOUND:
            raise SeparationError(
                f"coefficients diverged at iteration {iterations}; the data may be separable"
            )
        if delta < tol:
            converged = True
            break
    pi = softmax_probabilities(X, B)
    W = np.array([weight_vector(pi, j) for j in range(k)])
    crossprods = tuple(_crossprod(X, W[j]) for j in range(k))
    for C in crossprods:
        C.setflags(write=False)
    W.setflags(write=False)
    return MleFit(
        coeffs=CoefficientSet(B, data.category_order),
        weighted_crossprods=crossprods,
        weights=W,
        iterations=iterations,
        converged=converged,
        final_delta=delta,
        tol=tol,
    )


def mle_covariance(fit: MleFit, require_converged: bool = True) -> tuple[np.ndarray, ...]:
    """Asymptotic covariance (X'W_jX)^-1 per category."""
    if require_converged and not fit.converged:
        raise ValueError("covariance requested for a fit that did not converge")
    try:
        return tuple(inverse_spd(C) for C in fit.weighted_crossprods)
    except NotPositiveDefiniteError as exc:
        raise MulticollinearityError(str(exc)) from None


def standard_errors(fit: MleFit, require_converged: bool = True) -> np.ndarray:
    return np.array([np.sqrt(np.diag(V)) for V in mle_covariance(fit, require_converged)])


def mle_scalar_mse(eigenvalues) -> float:
    """sum_i 1 / lambda_i for the eigenvalues of one category's X'W_jX."""
    lam = np.asarray(eigenvalues, dtype=float)
    if lam.size == 0 or np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    return float(np.sum(1.0 / lam))
