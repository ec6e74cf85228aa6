"""Katz centrality and Leontief input-output equilibrium.

Both applications are solves against I - B for a nonnegative B whose
spectral radius must certifiably stay below one.
"""

import numpy as np

import perronkit as pk

rng = np.random.default_rng(5)
n = 15
adj = np.where(rng.random((n, n)) < 0.3, rng.uniform(0.2, 1.0, (n, n)), 0.0)
for i in range(n):
    adj[i, (i + 1) % n] = max(adj[i, (i + 1) % n], 0.3)
A = pk.SparseMatrix.from_dense(adj)
rho, _ = pk.oracle.dense_spectral_radius(adj)

decay = 0.8 / rho
print(f"Katz centrality with decay alpha = 0.8 / rho = {decay:.4f}")
v, report = pk.katz_centrality(A, decay, np.ones(n), eps=1e-10)
ranking = np.argsort(-v)
print(f"  residual: {report.residuals[-1]:.3e}")
print(f"  top three nodes: {ranking[:3].tolist()}")

too_big = 1.2 / rho
print(f"\ndecay {too_big:.4f} exceeds 1/rho:")
try:
    pk.katz_centrality(A, too_big, np.ones(n), eps=1e-8)
except pk.DecayTooLarge as exc:
    print(f"  DecayTooLarge: {exc}")

print("\nLeontief economy (consumption matrix scaled to rho = 0.7):")
consumption = adj * (0.7 / rho)
demand = rng.uniform(0.5, 2.0, n)
verdict, output = pk.leontief_equilibrium(
    pk.SparseMatrix.from_dense(consumption), demand, eps=1e-10
)
print(f"  Hawkins-Simons condition holds: {verdict}")
print(f"  gross output >= demand everywhere: {bool(np.all(output >= demand - 1e-9))}")

print("\nunproductive economy (rho = 1.4):")
verdict, _ = pk.leontief_equilibrium(
    pk.SparseMatrix.from_dense(adj * (1.4 / rho)), demand, eps=1e-10
)
print(f"  Hawkins-Simons condition holds: {verdict}")
