"""Multinomial logistic Liu estimator and its biasing-parameter selectors.

For one category with weighted cross-product C = X'W_jX and MLE b,

    beta_liu(d) = (C + I)^-1 (C + d I) b,      0 <= d <= 1.

Scalar-MSE helpers work in the eigenbasis of C: `lam` holds its eigenvalues
and `alpha` the rotated coefficients T'b.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .irls import MleFit
from .linalg import inverse_spd, solve_spd, symmetric_eigen
from .model import CoefficientSet

RULES = ("d1", "d2", "d3")


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: np.ndarray
    rotation: np.ndarray
    alpha: np.ndarray


class LiuMoments(NamedTuple):
    covariance: np.ndarray
    bias: np.ndarray
    mmse: np.ndarray


@dataclass(frozen=True)
class LiuFit:
    """Shrunken coefficients with per-category d and plug-in moments.

    Moments use the MLE in place of the unknown true coefficients.
    """

    coeffs: CoefficientSet
    d_values: tuple[float, ...]
    rule: str
    covariance: tuple[np.ndarray, ...]
    bias: tuple[np.ndarray, ...]
    mmse: tuple[np.ndarray, ...]
    scalar_mse: tuple[float, ...]


def spectral_summary(C, beta_mle) -> SpectralSummary:
    eig = symmetric_eigen(C)
    beta_mle = np.asarray(beta_mle, dtype=float)
    if beta_mle.shape != (eig.eigenvalues.size,):
        raise ValueError("coefficient length does not match the cross-product dimension")
    return SpectralSummary(
        eigenvalues=eig.eigenvalues,
        rotation=eig.eigenvectors,
        alpha=eig.eigenvectors.T @ beta_mle,
    )


def _check_d(d: float) -> float:
    d = float(d)
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"biasing parameter d={d} outside [0, 1]")
    return d


def liu_estimate(beta_mle, C, d: float) -> np.ndarray:
    """(C + I)^-1 (C + dI) beta_mle."""
    d = _check_d(d)
    C = np.asarray(C, dtype=float)
    beta_mle = np.asarray(beta_mle, dtype=float)
    if C.ndim != 2 or beta_mle.shape != (C.shape[0],):
        raise ValueError("dimension mismatch between C and beta")
    if d == 1.0:
        return beta_mle.copy()
    eye = np.eye(C.shape[0])
    return solve_spd(C + eye, (C + d * eye) @ beta_mle)


def liu_moments(C, d: float, beta) -> LiuMoments:
    """Covariance, bias and matrix MSE of the Liu estimator at true coefficients `beta`."""
    d = _check_d(d)
    C = np.asarray(C, dtype=float)
    beta = np.asarray(beta, dtype=float)
    eye = np.eye(C.shape[0])
    # (C+I)^-1 (C+dI); the two factors commute
    A = eye if d == 1.0 else solve_spd(C + eye, C + d * eye)
    cov = A @ inverse_spd(C) @ A.T
    cov = 0.5 * (cov + cov.T)
    bias = -(1.0 - d) * solve_spd(C + eye, beta)
    return LiuMoments(cov, bias, cov + np.outer(bias, bias))


def _spectrum(lam, alpha):
    lam = np.asarray(lam, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if lam.shape != alpha.shape:
        raise ValueError("lambda and alpha must have the same length")
    if np.any(lam <= 0):
        raise ValueError("eigenvalues must be positive")
    return lam, alpha


def liu_scalar_mse(lam, alpha, d: float) -> float:
    lam, alpha = _spectrum(lam, alpha)
    variance = np.sum((lam + d) ** 2 / (lam * (lam + 1.0) ** 2))
    bias_sq = (1.0 - d) ** 2 * np.sum(alpha**2 / (lam + 1.0) ** 2)
    return float(variance + bias_sq)


def mse_gradient(lam, alpha, d: float) -> float:
    """Derivative of :func:`liu_scalar_mse` with respect to d."""
    lam, alpha = _spectrum(lam, alpha)
    return float(
        np.sum(2.0 * (lam + d) / (lam * (lam + 1.0) ** 2))
        - 2.0 * (1.0 - d) * np.sum(alpha**2 / (lam + 1.0) ** 2)
    )


def d_individual(lam, alpha_sq):
    """Per-component minimiser lam (alpha^2 - 1) / (1 + lam alpha^2); may be negative."""
    lam = np.asarray(lam, dtype=float)
    alpha_sq = np.asarray(alpha_sq, dtype=float)
    if np.any(lam <= 0) or np.any(alpha_sq < 0):
        raise ValueError("need lambda > 0 and alpha^2 >= 0")
    out = lam * (alpha_sq - 1.0) / (1.0 + lam * alpha_sq)
    return float(out) if out.ndim == 0 else out


def combine_d(values, rule: str) -> float:
    """Collapse individual d values by `rule`, floored at 0 and capped at 1."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty spectrum")
    if rule == "d1":
        raw = values.mean()
    elif rule == "d2":
        raw = np.median(values)
    elif rule == "d3":
        raw = values.min()
    else:
        raise ValueError(f"unknown rule {rule!r}; expected one of {RULES}")
    return float(min(1.0, max(0.0, raw)))


def select_d(summary: SpectralSummary, rule: str) -> float:
    return combine_d(d_individual(summary.eigenvalues, summary.alpha**2), rule)


def parse_rule(rule) -> tuple[str, float | None]:
    """Normalise 'd1'/'d2'/'d3', 'fixed:<v>' or a bare number into (name, fixed value)."""
    if isinstance(rule, (int, float)):
        return "fixed", _check_d(rule)
    rule = str(rule).strip()
    if rule in RULES:
        return rule, None
    if rule.startswith("fixed:"):
        try:
            value = float(rule.split(":", 1)[1])
        except ValueError:
            raise ValueError(f"cannot parse fixed d from {rule!r}") from None
        return "fixed", _check_d(value)
    raise ValueError(f"unknown d rule {rule!r}; expected d1, d2, d3 or fixed:<value>")


def fit_liu(mle: MleFit, rule="d3") -> LiuFit:
    """Apply the Liu estimator to every category of a fitted MLE."""
    name, fixed = parse_rule(rule)
    betas, ds, covs, biases, mmses, mses = [], [], [], [], [], []
    for C, b in zip(mle.weighted_crossprods, mle.coeffs.betas):
        summary = spectral_summary(C, b)
        d = fixed if fixed is not None else select_d(summary, name)
        moments = liu_moments(C, d, b)
        betas.append(liu_estimate(b, C, d))
        ds.append(d)
        covs.append(moments.covariance)
        biases.append(moments.bias)
        mmses.append(moments.mmse)
        mses.append(liu_scalar_mse(summary.eigenvalues, summary.alpha, d))
    return LiuFit(
        coeffs=CoefficientSet(np.array(betas), mle.coeffs.category_order),
        d_values=tuple(ds),
        rule=name if fixed is None else f"fixed:{fixed!r}",
        covariance=tuple(covs),
        bias=tuple(biases),
        mmse=tuple(mmses),
        scalar_mse=tuple(mses),
    )
