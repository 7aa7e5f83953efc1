import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize

from conftest import random_dataset
from liu_mnl.irls import (
    MulticollinearityError,
    SeparationError,
    fit_mle,
    mle_covariance,
    mle_scalar_mse,
    standard_errors,
    working_response,
)
from liu_mnl.linalg import symmetric_eigen
from liu_mnl.model import Dataset, log_likelihood, score, softmax_probabilities


def scipy_mle(data: Dataset) -> np.ndarray:
    """Independent oracle: BFGS on the full negative log-likelihood."""
    k, q = data.m - 1, data.q

    def nll(theta):
        return -log_likelihood(softmax_probabilities(data.X, theta.reshape(k, q)), data.codes)

    def grad(theta):
        B = theta.reshape(k, q)
        return -score(data.X, data.codes, softmax_probabilities(data.X, B)).ravel()

    res = minimize(nll, np.zeros(k * q), jac=grad, method="BFGS", options={"gtol": 1e-10, "maxiter": 10_000})
    return res.x.reshape(k, q)


def test_matches_scipy_oracle(rng):
    data, _ = random_dataset(rng, n=300, p=4, m=4)
    fit = fit_mle(data, tol=1e-10)
    assert fit.converged
    np.testing.assert_allclose(fit.coeffs.betas, scipy_mle(data), atol=1e-5)


def test_score_vanishes_at_solution(rng):
    data, _ = random_dataset(rng, n=250, p=3)
    fit = fit_mle(data, tol=1e-10)
    g = score(data.X, data.codes, softmax_probabilities(data.X, fit.coeffs))
    assert np.abs(g).max() < 1e-6


def test_recovers_truth_at_large_n():
    rng = np.random.default_rng(99)
    data, B = random_dataset(rng, n=20_000, p=3, scale=0.8)
    fit = fit_mle(data)
    se = standard_errors(fit)
    assert np.all(np.abs(fit.coeffs.betas - B) < 4 * se)


def test_fit_artifacts_are_consistent(rng):
    data, _ = random_dataset(rng, n=200, p=3)
    fit = fit_mle(data)
    pi = softmax_probabilities(data.X, fit.coeffs)
    for j, C in enumerate(fit.weighted_crossprods):
        w = pi[:, j] * (1 - pi[:, j])
        np.testing.assert_allclose(fit.weights[j], w, atol=1e-15)
        np.testing.assert_allclose(C, data.X.T @ np.diag(w) @ data.X, rtol=1e-12)
        np.testing.assert_allclose(mle_covariance(fit)[j] @ C, np.eye(3), atol=1e-10)
    assert fit.coeffs.category_order == ("1", "2")
    assert fit.final_delta < fit.tol and 1 <= fit.iterations <= 100


def test_mle_scalar_mse_is_trace_of_inverse(rng):
    data, _ = random_dataset(rng, n=200, p=4)
    fit = fit_mle(data)
    for C in fit.weighted_crossprods:
        lam = symmetric_eigen(C).eigenvalues
        assert mle_scalar_mse(lam) == pytest.approx(np.trace(np.linalg.inv(C)), rel=1e-10)
    assert mle_scalar_mse([2.0, 4.0]) == pytest.approx(0.75)
    with pytest.raises(ValueError):
        mle_scalar_mse([1.0, 0.0])


def test_duplicating_rows_halves_covariance(rng):
    data, _ = random_dataset(rng, n=150, p=3)
    doubled = Dataset(np.vstack([data.X, data.X]), np.concatenate([data.codes, data.codes]), data.levels)
    a, b = fit_mle(data, tol=1e-10), fit_mle(doubled, tol=1e-10)
    np.testing.assert_allclose(a.coeffs.betas, b.coeffs.betas, atol=1e-8)
    for Va, Vb in zip(mle_covariance(a), mle_covariance(b)):
        np.testing.assert_allclose(Vb, Va / 2, rtol=1e-6)


def test_deterministic(rng):
    data, _ = random_dataset(rng, n=120, p=3)
    a, b = fit_mle(data), fit_mle(data)
    np.testing.assert_array_equal(a.coeffs.betas, b.coeffs.betas)
    assert a.iterations == b.iterations


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), m=st.integers(2, 4), p=st.integers(1, 4))
def test_log_likelihood_beats_zero_start(seed, m, p):
    data, _ = random_dataset(np.random.default_rng(seed), n=150, p=p, m=m, scale=0.5)
    fit = fit_mle(data)
    ll_fit = log_likelihood(softmax_probabilities(data.X, fit.coeffs), data.codes)
    assert ll_fit >= -data.n * np.log(m) - 1e-9


def test_non_convergence_is_flagged(rng):
    data, _ = random_dataset(rng, n=200, p=3, scale=1.5)
    fit = fit_mle(data, max_iter=1)
    assert not fit.converged and fit.iterations == 1
    with pytest.raises(ValueError, match="converge"):
        mle_covariance(fit)
    assert len(mle_covariance(fit, require_converged=False)) == 2


def test_separable_data_does_not_converge():
    x = np.linspace(-1, 1, 40)
    X = np.column_stack([x, np.ones(40)])
    codes = (x > 0.05).astype(int)
    fit = fit_mle(Dataset(X, codes, ("a", "b")), max_iter=200)
    assert not fit.converged


def test_divergence_bound_raises():
    # separable and badly scaled: coefficients pass 1e8 before max_iter
    x = np.linspace(-1, 1, 40)
    X = (1e-6 * x)[:, None]
    codes = (x > 0).astype(int)
    with pytest.raises(SeparationError, match="diverged"):
        fit_mle(Dataset(X, codes, ("a", "b")), max_iter=200)


def test_collinear_design_raises(rng):
    x = rng.standard_normal(50)
    X = np.column_stack([x, 2 * x])
    codes = rng.integers(0, 2, size=50)
    codes[:2] = [0, 1]
    with pytest.raises(MulticollinearityError):
        fit_mle(Dataset(X, codes, ("a", "b")))


def test_bad_arguments(rng):
    data, _ = random_dataset(rng, n=50, p=2)
    with pytest.raises(ValueError):
        fit_mle(data, tol=0)
    with pytest.raises(ValueError):
        fit_mle(data, max_iter=0)


def test_working_response():
    eta = np.array([0.0, 1.0])
    y = np.array([1.0, 0.0])
    pi = np.array([0.5, 0.0])
    z = working_response(eta, y, pi)
    np.testing.assert_allclose(z, [0.0 + 0.5 / 0.25, 1.0 + 0.0])
