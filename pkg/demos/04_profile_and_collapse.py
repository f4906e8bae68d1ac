"""Self-similar limit of the amplitude equation.

Computes the fixed-point profile for a given mass and then shows a Gaussian of
the same mass collapsing onto it in similarity variables. About 10 s.

Run: python demos/04_profile_and_collapse.py
"""

import numpy as np

from eckhaus_lab.selfsim import CollapseConfig, collapse_run, fixed_point_profile

for A in (0.01, 0.05, 0.1):
    sol = fixed_point_profile(A)
    corr = np.max(np.abs(sol.psi_minus.values))
    print(f"A = {A:<5} residual {sol.residual:.1e} after {sol.iterations} iterations, "
          f"|psi_-| = {corr:.3e}, |psi_-| / A^2 = {corr / A**2:.4f}")

_, series = collapse_run(CollapseConfig())
print("\n   t        e(t)")
for t, e in series[:: max(1, len(series) // 10)]:
    print(f"{t:8.1f}  {e:.3e}")
