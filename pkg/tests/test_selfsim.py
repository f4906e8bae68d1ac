import math

import numpy as np
import pytest

from eckhaus_lab.harness import fit_decay_exponent
from eckhaus_lab.normalform import fit_loglog
from eckhaus_lab.selfsim import (
    NU_CANONICAL,
    NU_ECKHAUS,
    PROFILE_GRID,
    AmplitudeState,
    CollapseConfig,
    DegenerateCoefficients,
    MassNotZero,
    apply_L,
    canonical_rescale,
    canonical_residual,
    collapse_metric,
    fixed_point_profile,
    gaussian_of_mass,
    invert_L,
    mass,
    nonlinear_hat,
    p0_project,
    phi_lin,
    profile_values,
    psi0_hat,
    sample_on_grid,
    simulate_amplitude,
)
from eckhaus_lab.spectral import Grid, RealField, SpectralField, evaluate_at, fft_phys, ifft_spec

G = Grid(1024, 400.0)
K = PROFILE_GRID.k


def _spec(values):
    return SpectralField(PROFILE_GRID, values.astype(complex))


# ------------------------------------------------------------ amplitude equation


def test_phi_lin_basic():
    f = phi_lin()
    assert f.coeffs[0] == 1.0
    vals = ifft_spec(f.coeffs, PROFILE_GRID)
    assert np.max(np.abs(vals.imag)) <= 1e-12
    xi = np.array([0.7, 1.9, 3.3])
    assert np.allclose(evaluate_at(f.coeffs, PROFILE_GRID, xi), evaluate_at(f.coeffs, PROFILE_GRID, -xi))


def test_linear_evolution_approaches_phi_lin():
    b = np.exp(-G.x**2 / 2)
    b *= 2 * math.pi / (np.sum(b) * G.dx)  # transform equal to 1 at k = 0
    st = simulate_amplitude(AmplitudeState(0.0, RealField(G, b)), 0.75, 0.0, t_end=1e3, dt=1.0)
    T = st[-1].t
    xi = np.linspace(-10, 10, 201)
    vals = evaluate_at(fft_phys(st[-1].phi.values, G), G, xi * T**0.25).real * T**0.25
    ref = evaluate_at(phi_lin().coeffs, PROFILE_GRID, xi).real
    assert np.max(np.abs(vals - ref)) <= 0.02


def test_zero_and_mass_conservation():
    z = simulate_amplitude(AmplitudeState(0.0, RealField(G, np.zeros(G.n))), t_end=10.0)
    assert np.all(z[-1].phi.values == 0)
    w = 0.05 * np.exp(-G.x**2 / 8)
    st = simulate_amplitude(AmplitudeState(0.0, RealField(G, w)), *NU_ECKHAUS, t_end=1e3, dt=0.5,
                            sample_times=[10, 100, 1000])
    m0 = mass(RealField(G, w))
    for s in st:
        assert abs(mass(s.phi) - m0) <= 1e-12 * abs(m0)


def test_sup_decay_exponent():
    w = 0.05 * np.exp(-G.x**2 / 8)
    ts = np.geomspace(1, 1e4, 41)
    st = simulate_amplitude(AmplitudeState(0.0, RealField(G, w)), *NU_ECKHAUS, t_end=1e4, dt=0.5,
                            sample_times=ts)
    rep = fit_decay_exponent([(s.t, np.max(np.abs(s.phi.values))) for s in st], (1e2, 1e4))
    assert rep.alpha == pytest.approx(0.25, abs=0.05)


def test_canonical_rescale():
    assert canonical_rescale(*NU_CANONICAL) == (1.0, 1.0, 1.0)
    nu1, nu2 = NU_ECKHAUS
    a, b, c = canonical_rescale(nu1, nu2)
    assert abs(c * nu1 / b**4 - 1) <= 1e-14
    assert abs(-c * nu2 / (a * b**3) - 1) <= 1e-14
    with pytest.raises(DegenerateCoefficients):
        canonical_rescale(0.0, -1.0)
    w = 0.05 * np.exp(-G.x**2 / 8)
    st = simulate_amplitude(AmplitudeState(0.0, RealField(G, w)), nu1, nu2, t_end=10.02, dt=0.001,
                            sample_times=[10.0, 10.01, 10.02])
    assert canonical_residual(st, a, c) <= 1e-6


# ------------------------------------------------------------ profile operators


@pytest.mark.parametrize("s", [0, 1, 2, 3])
def test_eigenpairs(s):
    f = K**s * np.exp(-K**4)
    out = apply_L(_spec(f)).coeffs
    assert np.max(np.abs(out + 0.25 * s * f)) <= 1e-8


def test_apply_L_linear():
    rng = np.random.default_rng(0)
    f = np.exp(-K**4) * rng.standard_normal(K.size)
    g = np.exp(-K**2) * rng.standard_normal(K.size)
    lhs = apply_L(_spec(2 * f - 3 * g)).coeffs
    rhs = 2 * apply_L(_spec(f)).coeffs - 3 * apply_L(_spec(g)).coeffs
    assert np.max(np.abs(lhs - rhs)) <= 1e-12


def test_invert_L():
    psi2 = K**2 * np.exp(-K**4)
    f = apply_L(_spec(psi2))
    assert np.max(np.abs(invert_L(f).coeffs - psi2)) <= 1e-8
    assert np.all(invert_L(_spec(np.zeros(K.size))).coeffs == 0)
    bad = np.zeros(K.size)
    bad[0] = 0.1
    with pytest.raises(MassNotZero):
        invert_L(_spec(bad))
    # L(invert_L(f)) = f for a mass-free right-hand side
    g = 1j * K * np.exp(-K**2)
    u = invert_L(_spec(g))
    assert np.max(np.abs(apply_L(u).coeffs - g)) <= 1e-8
    assert u.coeffs[0] == 0


def test_adjoint_identity_and_mass_free_nonlinearity():
    u = _spec(K**2 * np.exp(-K**4) + 1j * K * np.exp(-K**2))
    # <L u, 1> = 2 pi (L u)^(0)
    assert abs(2 * math.pi * apply_L(u).coeffs[0]) <= 1e-10
    psi = 0.1 * psi0_hat()
    assert abs(nonlinear_hat(psi, PROFILE_GRID)[0]) <= 1e-12


def test_p0_project():
    g = PROFILE_GRID
    p0 = RealField(g, ifft_spec(psi0_hat(g), g).real)
    comp, rest = p0_project(p0)
    assert np.max(np.abs(comp.values - p0.values)) <= 1e-12
    assert np.max(np.abs(rest.values)) <= 1e-12
    free = RealField(g, np.gradient(np.exp(-g.x**2), g.dx))
    comp, _ = p0_project(free)
    assert np.max(np.abs(comp.values)) <= 1e-12
    rng = np.random.default_rng(1)
    u = RealField(g, rng.standard_normal(g.n) * np.exp(-(g.x / 50) ** 2))
    comp, rest = p0_project(u)
    assert abs(np.sum(rest.values) * g.dx) <= 1e-12 * (1 + np.sum(np.abs(u.values)) * g.dx)
    comp2, rest2 = p0_project(comp)
    assert np.allclose(comp2.values, comp.values, atol=1e-14)


# ------------------------------------------------------------ profile


def test_profile_zero():
    sol = fixed_point_profile(0.0)
    assert np.all(sol.psi.values == 0) and np.all(sol.psi_minus.values == 0)


def test_profile_residual_and_mass():
    sol = fixed_point_profile(0.1)
    assert sol.residual <= 1e-10 and sol.iterations <= 200
    g = sol.psi.grid
    assert abs(np.sum(sol.psi_minus.values) * g.dx) <= 1e-12
    assert sol.log[-1] == sol.residual
    with pytest.raises(ValueError):
        fixed_point_profile(0.5)


def test_psi_minus_is_quadratic():
    As = [0.01, 0.02, 0.04]
    norms = [np.max(np.abs(fixed_point_profile(A).psi_minus.values)) for A in As]
    assert fit_loglog(As, norms)[0] == pytest.approx(2.0, abs=0.05)


def test_collapse_metric_at_profile():
    sol = fixed_point_profile(0.05)
    start = AmplitudeState(1.0, sample_on_grid(sol, G))
    e = collapse_metric([start], profile=sol)
    assert e[0][1] <= 1e-8
    assert abs(mass(start.phi) - 0.05) <= 1e-10


def test_mass_free_data_decays_faster():
    x = G.x
    w = -0.1 * x * np.exp(-x**2 / 2)
    assert abs(mass(RealField(G, w))) <= 1e-14
    st = simulate_amplitude(AmplitudeState(1.0, RealField(G, w)), *NU_CANONICAL, t_end=1e3, dt=0.05,
                            sample_times=[10, 100, 1000])
    scaled = [s.t**0.25 * np.max(np.abs(s.phi.values)) for s in st]
    assert scaled[0] > scaled[1] > scaled[2]
    assert scaled[2] <= 0.5 * scaled[0]


def test_gaussian_of_mass_and_profile_values():
    assert mass(gaussian_of_mass(G, 0.05, 0.3)) == pytest.approx(0.05, rel=1e-13)
    sol = fixed_point_profile(0.05)
    xi = np.array([0.0, 1.0])
    assert np.allclose(profile_values(sol, xi), profile_values(sol, -xi), atol=1e-3)
    assert CollapseConfig().A == 0.05
