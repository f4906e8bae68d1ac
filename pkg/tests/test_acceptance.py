"""Acceptance criteria 1-10; each test records a PASS/FAIL line."""

import math

import numpy as np

from eckhaus_lab.dispersion import Q_ECKHAUS, eigenvalues, linear_matrix
from eckhaus_lab.gradedcas import (
    I,
    SQRT3,
    derive_effective_equation,
    jet_eigsystem,
    q,
    sym,
)
from eckhaus_lab.harness import compare_full_vs_amplitude, fit_decay_exponent, instability_probe
from eckhaus_lab.dispersion import ModeProjector
from eckhaus_lab.glsim import SimConfig
from eckhaus_lab.normalform import PROBE_TERMS, SlavingSolver, fit_loglog, kernel_probe
from eckhaus_lab.selfsim import CollapseConfig, apply_L, collapse_run, fixed_point_profile, invert_L, mass
from eckhaus_lab.spectral import Grid, SpectralField, fft_phys, spectral_l1


def test_c01_dispersion_exactness(record):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for k, qq in zip(rng.uniform(-5, 5, 1000), rng.uniform(-0.9, 0.9, 1000)):
        lam = np.array(eigenvalues(k, qq))
        ref = np.sort(np.linalg.eigvalsh(linear_matrix(k, qq)))[::-1]
        worst = max(worst, float(np.max(np.abs(lam - ref) / (1 + np.abs(ref)))))
    ks = np.geomspace(1e-3, 1e-1, 30)
    slope = float(np.polyfit(np.log(ks), np.log(np.abs(eigenvalues(ks, Q_ECKHAUS)[0])), 1)[0])
    ok = worst <= 1e-12 and abs(slope - 4.0) <= 0.01
    assert record(1, ok, f"max eig error {worst:.1e}, quartic slope {slope:.4f}")


def test_c02_symbolic_golden(record):
    r = derive_effective_equation()
    Vc, Vs, Wc = sym("Vc"), sym("Vs"), sym("Wc")
    d = lambda p, n=1: p.differentiate(n)  # noqa: E731
    checks = {
        "s2": r["s2"] == Vs.scale(q(-4, 3)) - Vc.pow(2).scale(q(2, 3)),
        "s3 vanishes": r["s3"].substitute({"Vs": Vc.pow(2).scale(q(-1, 2))}).is_zero(),
        "s4": r["s4"] == d(Vs, 2).scale(2) + (
            (Vc.pow(2) * Vs).scale(-4) - Vs.pow(2).scale(12) - (Vc.pow(2) * d(Vc)).scale(SQRT3 * 4)
            + (Vs * d(Vc)).scale(SQRT3 * 8) - d(Vc).pow(2).scale(9)).scale(q(1, 6)),
        "s5": r["s5"] == d(Wc, 4).scale(q(-3, 4)) + d(d(Wc).pow(2)).scale(SQRT3 * q(-3, 2)),
    }
    J = jet_eigsystem(8)
    h = SQRT3 * I * q(1, 2)
    a, b = J.phi1[0], J.phi2[1]
    checks["a1 a3"] = a[1] == -h and a[3] == q(3, 4) * h
    checks["b1 b3"] = b[1] == -h and b[3] == q(3, 4) * h
    checks["det"] = [J.det[n] for n in range(5)] == [1, 0, q(3, 4), 0, q(-9, 8)]
    bad = [k for k, v in checks.items() if not v]
    assert record(2, not bad, "all exact" if not bad else f"mismatch: {bad}")


def test_c03_decay_rate(eckhaus_run, record):
    alpha = fit_decay_exponent(eckhaus_run.series("l1_hat")).alpha
    linf = eckhaus_run.column("linf_hat")
    bound = 2 * linf[0] + 0.01
    ok = abs(alpha - 0.25) <= 0.05 and bool(np.all(linf <= bound))
    assert record(3, ok, f"alpha(L1) = {alpha:.3f}; max Linf {linf.max():.4f} vs bound {bound:.4f}")


def test_c04_mode_hierarchy(eckhaus_run, record):
    a_s = fit_decay_exponent(eckhaus_run.series("l1_hat_s")).alpha
    a_ws = fit_decay_exponent(eckhaus_run.series("l1_hat_ws")).alpha
    ok = a_s >= 0.45 and a_ws >= 1.0
    assert record(4, ok, f"alpha(v_s) = {a_s:.3f}, alpha(w_s) = {a_ws:.3f}")


def test_c05_slaving_quadratic(record):
    g = Grid(256, 2 * math.pi * 100)
    proj = ModeProjector(g)
    solver = SlavingSolver(g)
    x = g.x
    w = np.exp(-(x / 40.0) ** 2) * (0.3 + np.cos(0.05 * x) + 0.5 * np.sin(0.11 * x))
    base = proj.lift_c(fft_phys(w, g))
    base /= spectral_l1(base, g)
    sizes = np.geomspace(1e-3, 3e-2, 6)
    out = [spectral_l1(solver.solve(s * base)[0], g) for s in sizes]
    slope = fit_loglog(sizes, out)[0]
    assert record(5, abs(slope - 2.0) <= 0.05, f"slope {slope:.4f}")


def test_c06_kernel_scalings(record):
    need = dict(zip(PROBE_TERMS, (2.9, 3.9, 2.9, 1.9, 0.9)))
    got = {t: kernel_probe(t) for t in PROBE_TERMS}
    ok = all(got[t] >= need[t] for t in PROBE_TERMS)
    assert record(6, ok, ", ".join(f"{t} {got[t]:.2f}" for t in PROBE_TERMS))


def test_c07_limit_profile(record):
    sol = fixed_point_profile(0.1)
    As = [0.01, 0.02, 0.04]
    slope = fit_loglog(As, [np.max(np.abs(fixed_point_profile(A).psi_minus.values)) for A in As])[0]
    g = sol.psi_hat.grid
    k = g.k
    eig = max(float(np.max(np.abs(apply_L(SpectralField(g, k**s * np.exp(-k**4))).coeffs
                                  + 0.25 * s * k**s * np.exp(-k**4)))) for s in range(4))
    psi2 = k**2 * np.exp(-k**4)
    inv = float(np.max(np.abs(invert_L(apply_L(SpectralField(g, psi2))).coeffs - psi2)))
    ok = sol.residual <= 1e-10 and sol.iterations <= 200 and abs(slope - 2) <= 0.05 and eig <= 1e-8
    assert record(7, ok, f"residual {sol.residual:.1e} in {sol.iterations} it, slope {slope:.4f}, "
                         f"eigenpairs {eig:.1e}, inversion {inv:.1e}")


def test_c08_collapse(record):
    cfg = CollapseConfig()
    states, series = collapse_run(cfg)
    t = np.array([s for s, _ in series])
    e = np.array([v for _, v in series])
    e10 = e[np.argmin(np.abs(t - 10))]
    e1000 = e[np.argmin(np.abs(t - 1000))]
    m0 = mass(states[0].phi)
    drift = max(abs(mass(s.phi) - m0) for s in states) / abs(m0)
    ok = e1000 <= 0.1 * e10 and drift <= 1e-12
    assert record(8, ok, f"e(10) = {e10:.3e}, e(1e3) = {e1000:.3e} (ratio {e1000 / e10:.3f}), "
                         f"mass drift {drift:.1e}")


def test_c09_amplitude_validity(record):
    out = compare_full_vs_amplitude(SimConfig(), t0=10.0, t_end=1e3)
    w, wo = out["with_term"][-1], out["without_term"][-1]
    ok = w <= 0.1 and wo > w
    assert record(9, ok, f"relative gap at T=1e3: with term {w:.4f}, without {wo:.4f}")


def test_c10_instability(record):
    r = instability_probe(q=0.7)
    rel = abs(r["k_measured"] - r["k_theory"]) / r["k_theory"]
    ok = r["growth"] >= 10 and r["t_threshold"] is not None and r["t_threshold"] < 200 and rel <= 0.1
    assert record(10, ok, f"growth {r['growth']:.2e}, 10x at t={r['t_threshold']}, "
                          f"k {r['k_measured']:.4f} vs {r['k_theory']:.4f}")


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))
