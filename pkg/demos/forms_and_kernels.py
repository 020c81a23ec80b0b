"""
Absolutely continuous parts of matrices
=======================================

For PSD matrices A, B the absolutely continuous part of A with respect to B is
the limit of the parallel sums A : (n B). It is the largest PSD matrix below A
with range inside range(B).
"""
import numpy as np

from circlekit.forms import FormPair, parallel_sum, simon_decompose
from circlekit.kernelpair import FiniteKernel, kernel_lebesgue, orthogonal_split_check

A = np.array([[2.0, 1.0], [1.0, 1.0]])
B = np.diag([1.0, 0.0])
for n in (1, 10, 100, 1000):
    print(f"A : {n}B =", np.round(parallel_sum(A, n * B).real, 4).tolist())
d = simon_decompose(FormPair(A, B))
print("A_ac =", np.round(d.A_ac.real, 8).tolist(), " A_s =", np.round(d.A_s.real, 8).tolist())

rng = np.random.default_rng(0)
X = rng.standard_normal((5, 5))
k = FiniteKernel(X @ X.T)
Y = rng.standard_normal((5, 2))
K = FiniteKernel(Y @ Y.T)
ac, s = kernel_lebesgue(k, K)
print(orthogonal_split_check(k, ac, s))
