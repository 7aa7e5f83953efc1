"""Dense symmetric linear algebra used by the estimators.

Everything here works on small dense matrices (a few dozen rows at most):
a cyclic Jacobi eigensolver, a Cholesky (LAPACK) SPD solver and the
condition-number diagnostic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.lapack import dpotrf as _potrf, dpotrs as _potrs

SYMMETRY_TOL = 1e-10
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100
PIVOT_TOL = 1e-12


class NotPositiveDefiniteError(np.linalg.LinAlgError):
    """Raised when a Cholesky pivot is not safely positive."""


class JacobiConvergenceError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column k of `eigenvectors` pairs with eigenvalue k."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _check_symmetric(S) -> np.ndarray:
    S = np.array(S, dtype=float, copy=True)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {S.shape}")
    if S.shape[0] == 0:
        raise ValueError("matrix must be at least 1x1")
    if not np.all(np.isfinite(S)):
        raise ValueError("matrix has non-finite entries")
    scale = max(1.0, float(np.max(np.abs(S))))
    if np.max(np.abs(S - S.T)) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric")
    return S


def _round_robin(q: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Tournament ordering of all index pairs into rounds of disjoint pairs.

    Each round rotates disjoint planes, so the rotations in a round commute
    and can be applied as one orthogonal matrix. One sweep visits every pair
    exactly once.
    """
    players = list(range(q + (q % 2)))
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        left, right = [], []
        for k in range(size // 2):
            a, b = players[k], players[size - 1 - k]
            if a < q and b < q:
                left.append(min(a, b))
                right.append(max(a, b))
        rounds.append((np.array(left, dtype=int), np.array(right, dtype=int)))
        players = [players[0]] + [players[-1]] + players[1:-1]
    return rounds


_ROUNDS_CACHE: dict[int, list[tuple[np.ndarray, np.ndarray]]] = {}


def symmetric_eigen(S) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.

    Sweeps stop once the off-diagonal Frobenius norm drops below
    ``1e-12 * ||diag||``. Eigenvectors are signed so that their
    largest-magnitude component is non-negative.

    Raises
    ------
    ValueError
        If `S` is not square, finite and symmetric.
    JacobiConvergenceError
        If 100 sweeps do not reach the tolerance.
    """
    A = _check_symmetric(S)
    A = 0.5 * (A + A.T)
    q = A.shape[0]
    V = np.eye(q)
    if q > 1:
        rounds = _ROUNDS_CACHE.get(q)
        if rounds is None:
            rounds = _ROUNDS_CACHE.setdefault(q, _round_robin(q))
        off_mask = ~np.eye(q, dtype=bool)
        for sweep in range(MAX_SWEEPS + 1):
            off = np.sqrt(np.sum(A[off_mask] ** 2))
            if off <= JACOBI_TOL * np.linalg.norm(np.diag(A)):
                break
            if sweep == MAX_SWEEPS:
                raise JacobiConvergenceError(
                    f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal norm {off:.3e})"
                )
            for i, j in rounds:
                apq = A[i, j]
                active = apq != 0.0
                if not np.any(active):
                    continue
                i, j, apq = i[active], j[active], apq[active]
                theta = (A[j, j] - A[i, i]) / (2.0 * apq)
                t = np.sign(theta) / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t[theta == 0.0] = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                J = np.eye(q)
                J[i, i] = c
                J[j, j] = c
                J[i, j] = s
                J[j, i] = -s
                A = J.T @ A @ J
                A = 0.5 * (A + A.T)
                V = V @ J
    eigenvalues = np.diag(A).copy()
    order = np.argsort(-eigenvalues, kind="stable")
    eigenvalues = eigenvalues[order]
    V = V[:, order]
    lead = np.argmax(np.abs(V), axis=0)
    signs = np.where(V[lead, np.arange(q)] < 0, -1.0, 1.0)
    V = V * signs
    return EigenDecomposition(eigenvalues=eigenvalues, eigenvectors=V)


def solve_spd(A, B) -> np.ndarray:
    """Solve ``A X = B`` for symmetric positive definite `A` via Cholesky.

    `B` may be a vector or a matrix; the result has the same shape. A
    Cholesky pivot at or below ``1e-12 * max(diag(A))`` raises
    NotPositiveDefiniteError.
    """
    A = _check_symmetric(A)
    B = np.asarray(B, dtype=float)
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"right-hand side has {B.shape[0]} rows, expected {A.shape[0]}")
    if not np.all(np.isfinite(B)):
        raise ValueError("right-hand side has non-finite entries")
    return _cholesky_solve(A, B)


def _cholesky_solve(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Cholesky solve without input validation; callers guarantee a finite symmetric A."""
    L, info = _potrf(A, lower=1, clean=0, overwrite_a=0)
    floor = PIVOT_TOL * float(np.max(np.abs(np.diagonal(A))))
    pivots = np.diagonal(L) ** 2
    if info != 0 or not np.all(pivots > floor):
        k = info - 1 if info > 0 else int(np.argmin(pivots > floor))
        raise NotPositiveDefiniteError(
            f"matrix is not positive definite (pivot {pivots[k]:.3e} at index {k})"
        )
    X, info = _potrs(L, B, lower=1)
    if info != 0:
        raise ValueError(f"LAPACK potrs failed with info={info}")
    return X


def inverse_spd(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    inv = solve_spd(A, np.eye(A.shape[0]))
    return 0.5 * (inv + inv.T)


def condition_number(S) -> float:
    """sqrt(lambda_max / lambda_min) of a symmetric matrix with positive spectrum."""
    lam = symmetric_eigen(S).eigenvalues
    if lam[-1] <= 0.0:
        raise ValueError(f"smallest eigenvalue {lam[-1]:.3e} is not positive")
    return float(np.sqrt(lam[0] / lam[-1]))


def correlation_matrix(X) -> np.ndarray:
    """Pearson correlation matrix of the columns of X."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("need a 2-D array with at least two rows")
    centred = X - X.mean(axis=0)
    scale = np.sqrt(np.sum(centred**2, axis=0))
    if np.any(scale == 0.0):
        raise ValueError("a column is constant; correlation undefined")
    Z = centred / scale
    R = Z.T @ Z
    R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 1.0)
    return R


def multicollinearity_level(cn: float) -> str:
    """'none' for CN <= 10, 'moderate' for 10 < CN <= 30, 'strong' above 30."""
    if cn > 30.0:
        return "strong"
    if cn > 10.0:
        return "moderate"
    return "none"
