"""Symbolic derivation of the effective equation near the Eckhaus boundary.

Everything is exact: the linear eigen-system comes from k-jets, the
nonlinearity is expanded as a weight-graded differential polynomial and
truncated at the weights relevant for the T^{-1/4} scaling.
"""

from __future__ import annotations

from fractions import Fraction

from .jets import KJet, jet_eigsystem
from .poly import GradedPoly, apply_operator, sym
from .scalar import SQRT3, q

W_SLAVED = Fraction(1)
W_CRITICAL = Fraction(5, 4)
TWO_OVER_SQRT3 = SQRT3 * q(2, 3)


class DerivationError(AssertionError):
    """A structural identity expected of the expansion failed."""


def _op(jet: KJet):
    return jet.as_operator()


def gl_residuals(vr: GradedPoly, vi: GradedPoly, max_weight):
    """Right-hand sides (g_r, g_i) of the perturbation equation at q^2 = 1/3.

    With r^2 = 2/3 and 2q = 2/sqrt3 the real and imaginary parts read
    g_r = vr'' - 4/3 vr - 2q vi' - 2/3 (3 vr^2 + vi^2 + vr^3 + vr vi^2) and
    g_i = vi'' + 2q vr' - 2/3 (2 vr vi + vr^2 vi + vi^3).
    """
    W = max_weight
    vr2 = vr.mul(vr, W)
    vi2 = vi.mul(vi, W)
    cubic_r = vr2.mul(vr, W) + vr.mul(vi2, W)
    cubic_i = vr2.mul(vi, W) + vi2.mul(vi, W)
    gr = (vr.differentiate(2) - vr.scale(q(4, 3)) - vi.differentiate().scale(TWO_OVER_SQRT3)
          - (vr2.scale(3) + vi2 + cubic_r).scale(q(2, 3)))
    gi = (vi.differentiate(2) + vr.differentiate().scale(TWO_OVER_SQRT3)
          - (vr.mul(vi, W).scale(2) + cubic_i).scale(q(2, 3)))
    return gr.truncate(W), gi.truncate(W)


def transformed_residuals(order=8):
    """(g_s, g_c) in the eigen-coordinates V = V_s phi2 + V_c phi1.

    g_s is kept through weight 1 and g_c through weight 5/4.
    """
    J = jet_eigsystem(order)
    a, b = J.phi1[0], J.phi2[1]
    vc, vs = sym("Vc"), sym("Vs")
    W = W_CRITICAL
    vr = vs + apply_operator(_op(a), vc, W)
    vi = vc + apply_operator(_op(b), vs, W)
    gr, gi = gl_residuals(vr, vi, W)
    (s11, s12), (s21, s22) = J.S_inv
    gs = apply_operator(_op(s11), gr, W) + apply_operator(_op(s12), gi, W)
    gc = apply_operator(_op(s21), gr, W) + apply_operator(_op(s22), gi, W)
    return gs.truncate(W_SLAVED), gc.truncate(W_CRITICAL)


def _expect_zero(p: GradedPoly, label):
    if not p.is_zero():
        raise DerivationError(f"{label} should vanish but has {len(p)} terms")


def vs_star_from(s2: GradedPoly, s4: GradedPoly, critical="Vc"):
    """Solve s2 + s4 = 0 for V_s as a polynomial in the critical field.

    s2 is -4/3 V_s plus terms without V_s, so V_s = 3/4 (s2 + s4 + 4/3 V_s)
    is iterated until it stops changing at weight <= 1.
    """
    rest = s2 + s4 + sym("Vs").scale(q(4, 3))
    vs = GradedPoly()
    for _ in range(6):
        new = rest.substitute({"Vs": vs}, W_SLAVED).scale(q(3, 4))
        if new == vs:
            break
        vs = new
    else:
        raise DerivationError("slaved-mode iteration did not settle")
    if any(s.base == "Vs" for s in vs.symbols()):
        raise DerivationError("V_s* still depends on V_s")
    return vs.rename({"Vc": critical}) if critical != "Vc" else vs


def derive_effective_equation(order=8):
    """Return the expansion terms and the reduced critical-mode equation.

    Keys: s2, s4 (slaved residual at weights 1/2 and 1), s3, s5_raw
    (critical residual at weights 3/4 and 5/4 in V_c, V_s), vs_star
    (the slaved graph as a polynomial in W_c) and s5 (the W_s-free weight
    5/4 part after the change of variables, which is the marginal
    equation for W_c).
    """
    gs, gc = transformed_residuals(order)
    for w in (Fraction(1, 4), Fraction(3, 4)):
        _expect_zero(gs.weight_part(w), f"g_s at weight {w}")
    for w in (Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        _expect_zero(gc.weight_part(w), f"g_c at weight {w}")
    s2, s4 = gs.weight_part(Fraction(1, 2)), gs.weight_part(1)
    s3, s5_raw = gc.weight_part(Fraction(3, 4)), gc.weight_part(Fraction(5, 4))

    # leading slaving makes s3 vanish
    _expect_zero(s3.substitute({"Vs": sym("Vc").pow(2).scale(q(-1, 2))}).truncate(Fraction(3, 4)),
                 "s3 on V_s = -V_c^2/2")

    vs_star = vs_star_from(s2, s4, critical="Wc")
    shifted = (s3 + s5_raw).substitute({"Vc": sym("Wc"), "Vs": vs_star + sym("Ws")}, W_CRITICAL)
    free = shifted.without("Ws")
    _expect_zero(free.truncate(Fraction(3, 4)), "W_s-free part below weight 5/4")
    s5 = free.weight_part(Fraction(5, 4))
    return {"s2": s2, "s3": s3, "s4": s4, "s5_raw": s5_raw, "vs_star": vs_star, "s5": s5}


def derive_vs_star(order=8):
    return derive_effective_equation(order)["vs_star"]


def marginal_coefficient(s5: GradedPoly):
    """Coefficient c in s5 = -3/4 d^4 W + c d_X((d_X W)^2)."""
    from .poly import GradedSymbol

    c = s5.coefficient((GradedSymbol("Wc", 1), GradedSymbol("Wc", 2)))
    return c * q(1, 2)


def slaved_graph_original(max_iter=8):
    """V_r as a polynomial in V_i from g_r = 0, kept through weight 1.

    This works directly in the original variables and serves as a
    cross-check of the eigen-coordinate reduction.
    """
    vr = GradedPoly()
    vi = sym("Vi")
    for _ in range(max_iter):
        gr, _ = gl_residuals(vr, vi, W_SLAVED)
        # g_r = -4/3 vr + rest; solve for vr
        new = (gr + vr.scale(q(4, 3))).truncate(W_SLAVED).scale(q(3, 4))
        if new == vr:
            return vr
        vr = new
    raise DerivationError("original-variable slaving did not settle")


def slaved_graph_transformed(order=8):
    """V_r(V_i) assembled from V_s* and the eigenvector components."""
    J = jet_eigsystem(order)
    a, b = _op(J.phi1[0]), _op(J.phi2[1])
    vs_star = derive_vs_star(order)
    vi = sym("Vi")
    # invert V_i = W + b(d) V_s*(W) for W
    w = vi
    for _ in range(8):
        new = (vi - apply_operator(b, vs_star, W_SLAVED).substitute({"Wc": w}, W_SLAVED)).truncate(W_SLAVED)
        if new == w:
            break
        w = new
    else:
        raise DerivationError("inversion of V_i(W) did not settle")
    vr_w = vs_star + apply_operator(a, sym("Wc"), W_SLAVED)
    return vr_w.substitute({"Wc": w}, W_SLAVED)


def vs_star_bracket(vs_star: GradedPoly):
    """R in V_s* = -W^2/2 - 3/4 d^2(W^2) + R/8, the grouping used in print."""
    w2 = sym("Wc").pow(2)
    return (vs_star + w2.scale(q(1, 2)) + w2.differentiate(2).scale(q(3, 4))).scale(8)
