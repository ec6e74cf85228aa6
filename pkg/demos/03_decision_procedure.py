"""Deciding whether I - A is an M-matrix, with witnesses either way.

The same halving scan that computes scalings turns into a decision procedure
once every convergence guarantee is checked: a positive answer carries an
RCDD scaling of the shifted matrix, a negative answer names the check that
failed.
"""

import numpy as np

import perronkit as pk

two_cycle = pk.SparseMatrix.from_dense([[0.0, 1.0], [1.0, 0.0]])

print("A = half the 2-cycle (rho = 1/2):")
out = pk.m_decide(two_cycle.scaled(0.5), eps=0.1, gamma=10.0)
print(f"  verdict: {out.verdict.value}")
S = pk.apply_scaling(
    out.scaling.left,
    pk.shifted_m_matrix(two_cycle.scaled(0.5), 1.0, 0.1),
    out.scaling.right,
)
print(f"  certificate: L ((1+eps) I - A) R RCDD -> {pk.check_rcdd(S, 1e-12)}")

print("\nA = twice the 2-cycle (rho = 2):")
out = pk.m_decide(two_cycle.scaled(2.0), eps=0.1, gamma=10.0)
print(f"  verdict: {out.verdict.value}")
print(f"  witness: {out.witness}")

print("\nbracketing the spectral radius by bisection over the decision:")
rng = np.random.default_rng(11)
n = 10
A_dense = np.where(rng.random((n, n)) < 0.4, rng.uniform(0.1, 1.0, (n, n)), 0.0)
for i in range(n):
    A_dense[i, (i + 1) % n] = max(A_dense[i, (i + 1) % n], 0.3)
A = pk.SparseMatrix.from_dense(A_dense)
rho, v_r = pk.oracle.dense_spectral_radius(A_dense, tol=1e-12)
_, v_l = pk.oracle.dense_spectral_radius(A_dense.T, tol=1e-12)
K = 1.1 * (v_l.max() / v_l.min() + v_r.max() / v_r.min())
norm_inf = pk.induced_norms(A).norm_inf
s, rep = pk.find_perron_value(A, 0.0, norm_inf, eps=0.01, K=K)
print(f"  bracket (0, {norm_inf:.4f}] refined in {rep.iterations} decisions")
print(f"  returned s = {s:.6f}; true rho = {rho:.6f}; s/rho = {s/rho:.6f}")
