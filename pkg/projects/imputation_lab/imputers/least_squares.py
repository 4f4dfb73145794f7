"""Least-squares solver used by the chained-equation regressor."""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, qr, solve_triangular

from imputation_lab.utils.errors import DataError

logger = logging.getLogger(__name__)

RIDGE_PENALTY = 1e-6


@dataclass(frozen=True)
class LeastSquaresFit:
    """Solved coefficients.

    Attributes:
        coef: Coefficient per design column.
        rank: Numerical rank of the design.
        used_ridge: Whether the ridge fallback was needed.
    """

    coef: np.ndarray
    rank: int
    used_ridge: bool


def fit_least_squares(X: np.ndarray, y: np.ndarray) -> LeastSquaresFit:
    """Minimize ||y - X b||^2 with a pivoted QR decomposition.

    A rank-deficient (or under-determined) design falls back to the
    ridge-regularized normal equations with penalty RIDGE_PENALTY.

    Args:
        X: Design matrix, intercept column included by the caller.
        y: Response vector.

    Returns:
        LeastSquaresFit: Coefficients, rank and fallback flag.

    Raises:
        DataError: If shapes disagree or the design is empty.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).ravel()
    if X.ndim != 2 or X.shape[0] != y.size:
        raise DataError(f"design shape {X.shape} does not match {y.size} responses")
    n, p = X.shape
    if n == 0 or p == 0:
        raise DataError("least squares needs a nonempty design")

    q, r, piv = qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = diag[0] * max(n, p) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    if rank == p and n >= p:
        coef = np.empty(p)
        coef[piv] = solve_triangular(r, q.T @ y)
        return LeastSquaresFit(coef, rank, False)

    logger.warning(
        "Rank-deficient design (rank %d of %d columns, %d rows); using ridge %.0e",
        rank,
        p,
        n,
        RIDGE_PENALTY,
    )
    gram = X.T @ X + RIDGE_PENALTY * np.eye(p)
    coef = cho_solve(cho_factor(gram), X.T @ y)
    return LeastSquaresFit(coef, rank, True)


def solve_least_squares(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Coefficients minimizing the sum of squared residuals."""
    return fit_least_squares(X, y).coef
