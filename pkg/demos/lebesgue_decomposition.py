"""
Lebesgue decomposition through kernels
======================================

Split mu = 0.5 m + 0.7 delta(pi/2) against Lebesgue measure, then look at the
half circles, where the kernel spaces intersect even though the measures
are mutually singular.
"""
import numpy as np

from circlekit.decompose import halfcircle_example, lebesgue_decompose
from circlekit.measure import CircleMeasure

m = CircleMeasure.lebesgue()
mu = 0.5 * m + CircleMeasure.point_mass(np.pi / 2, 0.7)
rep = lebesgue_decompose(mu, m, 256)
print("strategy:", rep.strategy.name)
print(f"ac mass {rep.mu_ac.mass:.6f}   singular atoms {rep.mu_s.atoms}")

rep = lebesgue_decompose(CircleMeasure.upper_half(), CircleMeasure.lower_half(), 512)
print("\nm_+ against m_-:", rep.invariance.name, rep.strategy.name)
print(f"{'N':>5} {'ac_mass':>10} {'rank':>5}")
for t in rep.traces:
    print(f"{t.N:5d} {t.ac_mass:10.2e} {t.intersection_rank:5d}")

hc = halfcircle_example(16)
print("\nhalf-circle moments vs closed form, max gap", hc.discrepancy)
print("k0(0) =", hc.k0_at_zero)
