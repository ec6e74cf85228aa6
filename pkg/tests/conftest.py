"""Shared instance generators for the test suite.

All generators are deterministic given the caller's ``numpy`` Generator, so
every test (and the acceptance suite) is reproducible bit for bit.
"""

from __future__ import annotations

import numpy as np

from perronkit import SparseMatrix
from perronkit.oracle import dense_spectral_radius


def random_irreducible_dense(rng, n, density=0.2, log_low=-2.0, log_high=0.0):
    """Nonnegative dense matrix with log-uniform weights, made irreducible by
    overlaying a random Hamiltonian cycle."""
    mask = rng.random((n, n)) < density
    M = np.where(mask, 10.0 ** rng.uniform(log_low, log_high, (n, n)), 0.0)
    perm = rng.permutation(n)
    cycle_w = 10.0 ** rng.uniform(log_low, log_high, n)
    for i in range(n):
        j = perm[(i + 1) % n]
        M[perm[i], j] = max(M[perm[i], j], cycle_w[i])
    return M


def random_irreducible(rng, n, density=0.2, log_low=-2.0, log_high=0.0):
    return SparseMatrix.from_dense(
        random_irreducible_dense(rng, n, density, log_low, log_high)
    )


def random_m_matrix_dense(rng, n, rho_ratio, density=0.3):
    """Dense nonnegative A scaled so that rho(A) = rho_ratio (s = 1)."""
    M = random_irreducible_dense(rng, n, density)
    rho, _ = dense_spectral_radius(M)
    return M * (rho_ratio / rho)


def random_m_matrix(rng, n, rho_ratio, density=0.3):
    return SparseMatrix.from_dense(random_m_matrix_dense(rng, n, rho_ratio, density))


def random_strictly_rcdd_dense(rng, n, margin=0.2):
    """Strictly RCDD matrix with mixed off-diagonal signs."""
    M = rng.normal(size=(n, n))
    np.fill_diagonal(M, 0.0)
    row = np.abs(M).sum(axis=1)
    col = np.abs(M).sum(axis=0)
    np.fill_diagonal(M, np.maximum(row, col) * (1.0 + margin) + margin)
    return M


def random_sdd_dense(rng, n, margin=0.2):
    M = rng.normal(size=(n, n))
    M = (M + M.T) / 2.0
    np.fill_diagonal(M, 0.0)
    row = np.abs(M).sum(axis=1)
    np.fill_diagonal(M, row * (1.0 + margin) + margin)
    return M


def random_symmetric_contraction_dense(rng, n, rho_ratio, density=0.3):
    """Symmetric nonnegative A with rho(A) = rho_ratio."""
    M = random_irreducible_dense(rng, n, density)
    M = (M + M.T) / 2.0
    rho, _ = dense_spectral_radius(M)
    return M * (rho_ratio / rho)


def dense_inverse_norms(M_dense):
    """(||M^-1||_inf, ||M^-1||_1) computed densely."""
    inv = np.linalg.inv(M_dense)
    return float(np.abs(inv).sum(axis=1).max()), float(np.abs(inv).sum(axis=0).max())
