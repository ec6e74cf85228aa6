"""Top singular triplet of a nonnegative (possibly rectangular) matrix.

The computation runs the certified Perron machinery on the explicitly formed
Gram matrices A.T A and A A.T.
"""

import numpy as np

import perronkit as pk

golden = pk.SparseMatrix.from_dense([[1.0, 1.0], [0.0, 1.0]])
triplet = pk.top_singular(golden, delta=1e-8)
print("A = [[1, 1], [0, 1]]:")
print(f"  sigma = {triplet.sigma:.10f} (the golden ratio)")
print(f"  exact  = {np.sqrt((3 + np.sqrt(5)) / 2):.10f}")

rng = np.random.default_rng(31)
tall = np.where(rng.random((40, 12)) < 0.3, rng.uniform(0.1, 1.0, (40, 12)), 0.0)
tall[np.arange(12), np.arange(12)] += 0.05  # keep every column active
A = pk.SparseMatrix.from_dense(tall)

triplet = pk.top_singular(A, delta=1e-8)
sigma_ref, left_ref, right_ref = pk.oracle.dense_svd_top(tall, tol=1e-13)
print(f"\nrectangular 40 x 12, nnz = {A.nnz}:")
print(f"  sigma       = {triplet.sigma:.12f}")
print(f"  dense oracle = {sigma_ref:.12f}")
print(f"  |A right|_2 / sigma = {np.linalg.norm(tall @ triplet.right) / triplet.sigma:.12f}")
print(f"  Gram residuals (right, left) = "
      f"({triplet.residuals[0]:.2e}, {triplet.residuals[1]:.2e})")
