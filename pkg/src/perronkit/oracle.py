"""Dense brute-force references used by the test suite.

Everything here is deliberately written against plain ``numpy`` arrays and
uses none of the sparse machinery from the rest of the package: power
iteration instead of dense eigensolvers, hand-rolled Gaussian elimination
instead of library solves.  Slow and auditable by design.
"""

from __future__ import annotations

import numpy as np

from .errors import NoConvergence, Singular

__all__ = ["dense_spectral_radius", "dense_solve", "dense_svd_top"]

_MAX_POWER_ITERS = 10**6


def _as_square(A) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square dense matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def dense_spectral_radius(A, tol: float = 1e-12):
    """Spectral radius and Perron vector of a nonnegative irreducible matrix.

    Power iteration from the all-ones vector with per-step sup-norm
    normalization.  Convergence is certified through the two-sided bounds
    ``min_i (Ax)_i / x_i <= rho <= max_i (Ax)_i / x_i``: the loop stops once
    the bracket width falls below ``tol`` relative to the estimate.  Period-2
    oscillation (bipartite-like structure) is broken by averaging two
    successive iterates, which cancels the ``-rho`` eigencomponent.

    Returns ``(rho, v)`` with ``v > 0`` normalized to unit sup-norm.
    """
    A = _as_square(A)
    if A.min() < 0:
        raise ValueError("matrix must be nonnegative")
    n = A.shape[0]
    if n == 1:
        return float(A[0, 0]), np.ones(1)

    x = np.ones(n)
    for k in range(_MAX_POWER_ITERS):
        y = A @ x
        if y.min() <= 0.0:
            raise ValueError("matrix appears reducible (power iterate hit zero)")
        ratios = y / x
        lower, upper = float(ratios.min()), float(ratios.max())
        est = 0.5 * (lower + upper)
        if upper - lower <= tol * est:
            return est, x / x.max()
        x_next = y / y.max()
        if (k + 1) % 48 == 0:
            # averaging two successive normalized iterates cancels the
            # oscillating eigencomponent of bipartite-like structure
            x_next = x + x_next
            x_next /= x_next.max()
        x = x_next
    raise NoConvergence(f"power iteration did not converge in {_MAX_POWER_ITERS} steps")


def dense_solve(M, b):
    """Solve ``M x = b`` by Gaussian elimination with partial pivoting.

    Raises :class:`Singular` when a pivot magnitude falls below 1e-300.
    """
    M = _as_square(M)
    n = M.shape[0]
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (n,):
        raise ValueError(f"right-hand side must have shape ({n},)")

    aug = np.hstack([M.copy(), b.reshape(n, 1)])
    for k in range(n):
        pivot_row = k + int(np.argmax(np.abs(aug[k:, k])))
        if abs(aug[pivot_row, k]) < 1e-300:
            raise Singular(f"pivot {abs(aug[pivot_row, k]):.3e} at column {k}")
        if pivot_row != k:
            aug[[k, pivot_row]] = aug[[pivot_row, k]]
        factors = aug[k + 1 :, k] / aug[k, k]
        aug[k + 1 :, k:] -= np.outer(factors, aug[k, k:])
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (aug[k, n] - aug[k, k + 1 : n] @ x[k + 1 :]) / aug[k, k]
    return x


def dense_svd_top(A, tol: float = 1e-12):
    """Top singular value and vectors of a nonnegative dense matrix.

    Power iteration on the Gram matrix using two matrix-vector products per
    step; ``sigma`` is the square root of the converged Rayleigh quotient.
    Returns ``(sigma, left, right)`` with unit 2-norm vectors.
    """
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError("expected a 2-D matrix")
    if A.size and A.min() < 0:
        raise ValueError("matrix must be nonnegative")
    n_cols = A.shape[1]
    x = np.ones(n_cols) / np.sqrt(n_cols)
    prev = None
    for _ in range(_MAX_POWER_ITERS):
        Ax = A @ x
        y = A.T @ Ax
        rayleigh = float(x @ y)
        if rayleigh <= 0.0:
            raise ValueError("zero matrix has no positive singular triplet")
        sigma = float(np.sqrt(rayleigh))
        if prev is not None and abs(sigma - prev) <= tol * sigma:
            right = x / np.linalg.norm(x)
            left = A @ right
            norm_left = np.linalg.norm(left)
            if norm_left == 0.0:
                raise ValueError("degenerate left vector")
            return sigma, left / norm_left, right
        prev = sigma
        x = y / np.linalg.norm(y)
    raise NoConvergence(f"singular power iteration did not converge in {_MAX_POWER_ITERS} steps")
