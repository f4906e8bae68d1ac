"""Exact weight-graded expansion around the marginal branch.

Prints each residual order in LaTeX, the slaved manifold, and the single
marginal coefficient that survives in the effective equation.

Run: python demos/02_derivation.py
"""

from eckhaus_lab.gradedcas import derive_effective_equation, emit_latex, jet_eigsystem, jet_latex
from eckhaus_lab.gradedcas import marginal_coefficient

J = jet_eigsystem(6)
print("lambda1 =", jet_latex(J.lambda1))
print("a(k)    =", jet_latex(J.phi1[0]))
print()
r = derive_effective_equation()
for key in ("s2", "s3", "s4", "s5_raw", "vs_star", "s5"):
    print(f"{key:7s} = {emit_latex(r[key])}")
print()
print("coefficient of d_X (d_X W)^2:", marginal_coefficient(r["s5"]))
