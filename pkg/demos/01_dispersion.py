"""Linear picture: the critical branch touches zero quartically at the Eckhaus boundary.

Run: python demos/01_dispersion.py
"""

import numpy as np

from eckhaus_lab.dispersion import Q_ECKHAUS, classify_stability, eckhaus_coefficient, eigenvalues

print(f"q_E = 1/sqrt(3) = {Q_ECKHAUS:.6f}")
for q in (0.0, 0.4, Q_ECKHAUS, 0.7):
    kind, sup = classify_stability(q)
    print(f"q = {q:.4f}  D(q) = {eckhaus_coefficient(q):+.4f}  {kind.name.lower():9s}  sup lambda1 = {sup:.2e}")

# on the boundary the k^2 term vanishes and lambda1 ~ -3/4 k^4
for k in (0.2, 0.1, 0.05, 0.025):
    lam = eigenvalues(k, Q_ECKHAUS)[0]
    print(f"k = {k:<6}  lambda1 = {lam:.3e}  lambda1 / k^4 = {lam / k**4:.5f}")
ks = np.geomspace(1e-3, 1e-1, 30)
slope = np.polyfit(np.log(ks), np.log(-eigenvalues(ks, Q_ECKHAUS)[0]), 1)[0]
print(f"log-log slope near k = 0: {slope:.4f}")
