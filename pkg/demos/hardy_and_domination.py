"""
Kernels of measures on the circle
=================================

Every positive measure on the circle carries a reproducing kernel on the disk.
Lebesgue measure gives the Szego kernel 1/(1 - z conj(w)).
"""
import numpy as np

from circlekit.kernel import KernelMethod, dominates_rk, gram, kernel_eval
from circlekit.measure import CircleMeasure

m = CircleMeasure.lebesgue()
pts = np.array([0, 0.5, 0.3j, -0.6 + 0.2j])
print("gram(m):")
print(np.round(gram(m, pts).entries, 4))
print("Szego:  ")
print(np.round(1 / (1 - pts[:, None] * pts.conj()[None, :]), 4))

# the kernel has an integral form and a Herglotz form; they agree
mu = 0.5 * CircleMeasure.upper_half() + CircleMeasure.point_mass(2.0, 0.3)
z, w = 0.4 + 0.1j, -0.2 + 0.5j
print("integral:", kernel_eval(mu, z, w, KernelMethod.Integral))
print("herglotz:", kernel_eval(mu, z, w, KernelMethod.Herglotz))

# kernel domination tracks measure domination
for name, nu in [("m_+", CircleMeasure.upper_half()), ("2m", CircleMeasure.lebesgue(2.0))]:
    res = dominates_rk(nu, m, 1.0)
    print(f"{name} <= m ?", res.verdict.name, f"(min eig {res.min_eig:.3g})")
