import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_dataset
from liu_mnl.model import (
    CoefficientSet,
    Dataset,
    log_likelihood,
    score,
    softmax_probabilities,
    weight_vector,
)


def test_zero_coefficients_give_uniform_probabilities():
    X = np.arange(12.0).reshape(4, 3)
    pi = softmax_probabilities(X, np.zeros((2, 3)))
    np.testing.assert_allclose(pi, 1 / 3, rtol=0, atol=1e-15)


def test_binary_ln2():
    pi = softmax_probabilities(np.array([[1.0]]), CoefficientSet([[math.log(2)]]))
    np.testing.assert_allclose(pi, [[2 / 3, 1 / 3]], atol=1e-15)


def test_softmax_matches_high_precision_oracle(rng):
    X = rng.standard_normal((5, 3))
    B = rng.standard_normal((3, 3))
    pi = softmax_probabilities(X, B)
    mpmath.mp.dps = 50
    for i in range(5):
        terms = [mpmath.exp(mpmath.fsum(mpmath.mpf(X[i, c]) * mpmath.mpf(B[j, c]) for c in range(3))) for j in range(3)]
        denom = 1 + mpmath.fsum(terms)
        expected = [float(t / denom) for t in terms] + [float(1 / denom)]
        np.testing.assert_allclose(pi[i], expected, rtol=0, atol=1e-12)


def test_softmax_survives_huge_predictors():
    pi = softmax_probabilities(np.array([[1.0], [-1.0]]), [[1000.0], [999.0]])
    assert np.all(np.isfinite(pi))
    np.testing.assert_allclose(pi.sum(axis=1), 1.0)


def test_softmax_errors():
    with pytest.raises(ValueError, match="dimension"):
        softmax_probabilities(np.ones((3, 2)), np.ones((2, 3)))
    with pytest.raises(ValueError, match="non-finite"):
        softmax_probabilities(np.array([[np.nan, 1.0]]), np.ones((1, 2)))


@settings(max_examples=50, deadline=None)
@given(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(1, 30),
    p=st.integers(1, 5),
    m=st.integers(2, 5),
    shift=st.floats(-50, 50),
)
def test_rows_sum_to_one_and_shift_invariance(seed, n, p, m, shift):
    r = np.random.default_rng(seed)
    X = 3 * r.standard_normal((n, p))
    B = 3 * r.standard_normal((m - 1, p))
    pi = softmax_probabilities(X, B)
    np.testing.assert_allclose(pi.sum(axis=1), 1.0, rtol=0, atol=1e-12)
    # adding a constant c to every category's predictor: use an extra constant column
    X1 = np.column_stack([X, np.ones(n)])
    B1 = np.column_stack([B, np.zeros(m - 1)])
    shifted = np.column_stack([X1 @ B1.T + shift, np.full(n, shift)])
    e = np.exp(shifted - shifted.max(axis=1, keepdims=True))
    np.testing.assert_allclose(e / e.sum(axis=1, keepdims=True), pi, atol=1e-12)


def test_log_likelihood_examples():
    pi = np.array([[1.0, 0.0], [0.0, 1.0]])
    assert log_likelihood(pi, np.array([0, 1])) == pytest.approx(0.0, abs=1e-11)
    uniform = np.full((6, 3), 1 / 3)
    assert log_likelihood(uniform, np.array([0, 1, 2, 0, 1, 2])) == pytest.approx(-6 * math.log(3), rel=1e-14)


def test_log_likelihood_summation_oracle(rng):
    pi = rng.dirichlet(np.ones(4), size=7)
    codes = rng.integers(0, 4, size=7)
    expected = 0.0
    for i in range(7):
        for j in range(4):
            if codes[i] == j:
                expected += math.log(pi[i, j])
    assert log_likelihood(pi, codes) == pytest.approx(expected, abs=1e-12)
    Y = np.eye(4)[codes]
    assert log_likelihood(pi, Y) == log_likelihood(pi, codes)


def test_log_likelihood_dimension_mismatch():
    with pytest.raises(ValueError):
        log_likelihood(np.full((3, 2), 0.5), np.array([0, 1]))


def _fd_gradient(X, codes, B, h=1e-6):
    grad = np.zeros_like(B)
    for j in range(B.shape[0]):
        for c in range(B.shape[1]):
            Bp, Bm = B.copy(), B.copy()
            Bp[j, c] += h
            Bm[j, c] -= h
            grad[j, c] = (
                log_likelihood(softmax_probabilities(X, Bp), codes)
                - log_likelihood(softmax_probabilities(X, Bm), codes)
            ) / (2 * h)
    return grad


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(5, 50), p=st.integers(1, 5), m=st.integers(2, 4))
def test_score_matches_finite_differences(seed, n, p, m):
    r = np.random.default_rng(seed)
    X = r.standard_normal((n, p))
    B = r.standard_normal((m - 1, p))
    codes = r.integers(0, m, size=n)
    g = score(X, codes, softmax_probabilities(X, B))
    fd = _fd_gradient(X, codes, B)
    np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-6 * max(1.0, np.abs(fd).max()))


def test_score_zero_when_indicators_equal_probabilities(rng):
    X = rng.standard_normal((6, 2))
    pi = softmax_probabilities(X, rng.standard_normal((2, 2)))
    np.testing.assert_allclose(score(X, pi, pi), 0.0, atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_log_likelihood_non_positive(seed):
    r = np.random.default_rng(seed)
    pi = r.dirichlet(np.ones(3), size=10)
    assert log_likelihood(pi, r.integers(0, 3, size=10)) <= 0.0


def test_weight_vector():
    pi = np.array([[0.5, 0.5], [0.0, 1.0]])
    np.testing.assert_array_equal(weight_vector(pi, 0), [0.25, 1e-10])
    col = np.random.default_rng(1).random(20)
    pi = np.column_stack([col, 1 - col])
    np.testing.assert_allclose(weight_vector(pi, 0), col * (1 - col), rtol=0, atol=1e-15)
    with pytest.raises(IndexError):
        weight_vector(pi, 2)


def test_dataset_from_labels_orders_levels_and_reference():
    X = np.arange(10.0).reshape(5, 2) ** 1.5
    data = Dataset.from_labels(X, [" b", "a", "c ", "a", "b"])
    assert data.levels == ("a", "b", "c")
    assert data.reference == "c"
    assert data.codes.tolist() == [1, 0, 2, 0, 1]
    other = Dataset.from_labels(X, ["b", "a", "c", "a", "b"], reference="a")
    assert other.levels == ("b", "c", "a")
    assert other.category_order == ("b", "c")
    with_const = Dataset.from_labels(X, ["b", "a", "c", "a", "b"], intercept=True, columns=["u", "v"])
    assert with_const.q == 3 and with_const.columns == ("(intercept)", "u", "v")
    np.testing.assert_array_equal(with_const.X[:, 0], 1.0)


@pytest.mark.parametrize(
    "X, codes, levels, message",
    [
        (np.ones((2, 2)), [0, 1], ("a", "b"), "more observations"),
        (np.array([[1.0], [np.inf], [2.0]]), [0, 1, 0], ("a", "b"), "non-finite"),
        (np.ones((3, 1)), [0, 0, 0], ("a", "b"), "never observed"),
        (np.ones((3, 1)), [0, 1, 0], ("a",), "two response levels"),
    ],
)
def test_dataset_invariants(X, codes, levels, message):
    with pytest.raises(ValueError, match=message):
        Dataset(X, np.array(codes), levels)


def test_unknown_reference():
    with pytest.raises(ValueError, match="reference"):
        Dataset.from_labels(np.ones((3, 1)) * [[1], [2], [3]], ["a", "b", "a"], reference="z")


def test_dataset_is_immutable(rng):
    data, _ = random_dataset(rng, n=20, p=2)
    with pytest.raises(ValueError):
        data.X[0, 0] = 1.0
