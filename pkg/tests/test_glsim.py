import math

import numpy as np
import pytest

from eckhaus_lab.dispersion import Q_ECKHAUS, ModeProjector, ProjectionSpec, eigenvalues
from eckhaus_lab.glsim import (
    DeltaTooLarge,
    InsufficientHistory,
    NonFinite,
    SimConfig,
    SimState,
    Trajectory,
    evolve,
    initial_perturbation,
    mode_split,
    nonlinearity,
    pde_residual,
    reconstruct_A,
    simulate,
    step,
)
from eckhaus_lab.spectral import Grid, RealField, fft_phys, ifft_spec, spectral_l1, spectral_linf

SMALL = dict(n=256, length=100.0, track_slaving=False)


def _norm_sum(state):
    c = state.spectral()
    return spectral_l1(c, state.grid) + spectral_linf(c)


def test_initial_perturbation():
    assert np.all(initial_perturbation(SimConfig(delta=0.0, **SMALL)).vr.values == 0)
    s = initial_perturbation(SimConfig(delta=0.05, **SMALL))
    assert _norm_sum(s) == pytest.approx(0.05, abs=1e-12)
    a = _norm_sum(initial_perturbation(SimConfig(delta=0.05, n=512, length=200.0)))
    b = _norm_sum(initial_perturbation(SimConfig(delta=0.05, n=1024, length=200.0)))
    assert abs(a - b) <= 1e-8
    with pytest.raises(DeltaTooLarge):
        initial_perturbation(SimConfig(delta=0.3, **SMALL))
    r = initial_perturbation(SimConfig(delta=0.05, ic_kind="random", seed=7, **SMALL))
    assert _norm_sum(r) == pytest.approx(0.05, abs=1e-12)


def test_config_validation():
    for bad in (dict(dt=0.0), dict(dt=3.0), dict(t_end=-1.0), dict(delta=-0.1), dict(ic_kind="box"),
                dict(dealias="1/3"), dict(q=1.0)):
        with pytest.raises(ValueError):
            SimConfig(**bad)


def _const_state(vr, vi, n=32):
    g = Grid(n, 10.0)
    return SimState(0.0, RealField(g, np.full(n, vr)), RealField(g, np.full(n, vi)))


def test_nonlinearity_examples():
    nr, ni = nonlinearity(_const_state(0.0, 0.0))
    assert np.all(nr.values == 0) and np.all(ni.values == 0)
    e = 0.1
    nr, ni = nonlinearity(_const_state(e, 0.0))
    assert np.allclose(nr.values, -2 / 3 * (3 * e**2 + e**3)) and np.allclose(ni.values, 0)
    nr, ni = nonlinearity(_const_state(0.0, e))
    assert np.allclose(nr.values, -2 / 3 * e**2) and np.allclose(ni.values, -2 / 3 * e**3)


def test_linear_step_is_exact():
    g = Grid(128, 2 * math.pi * 20)
    proj = ModeProjector(g, Q_ECKHAUS)
    j = 3
    k1 = g.k[j]
    amp = np.zeros(g.n, complex)
    amp[j] = 1e-3
    amp[-j] = 1e-3
    v = amp * proj.phi1
    # phi1(-k) = conj(phi1(k)) keeps the field real
    vals = ifft_spec(v, g).real
    s = SimState(0.0, RealField(g, vals[0]), RealField(g, vals[1]))
    dt = 0.7
    out = step(s, dt, linear_only=True).spectral()
    ratio = out[1, j] / v[1, j]
    assert abs(ratio - math.exp(eigenvalues(k1, Q_ECKHAUS)[0] * dt)) <= 1e-12
    z = step(SimState.zeros(g), 0.5)
    assert np.all(z.vr.values == 0) and np.all(z.vi.values == 0)


def test_fourth_order_convergence():
    cfg = SimConfig(delta=0.05, **SMALL)
    s0 = initial_perturbation(cfg)
    outs = [evolve(s0, 1.0, dt) for dt in (0.2, 0.1, 0.05)]
    d1 = np.max(np.abs(outs[0].vr.values - outs[1].vr.values))
    d2 = np.max(np.abs(outs[1].vr.values - outs[2].vr.values))
    assert 12 <= d1 / d2 <= 20


def test_simulate_zero_and_sampling():
    traj = simulate(SimConfig(delta=0.0, t_end=20.0, **SMALL))
    assert all(r["l1_hat"] == 0 and r["linf_hat"] == 0 for r in traj.rows)
    t = traj.times
    assert np.all(np.diff(t) > 0) and t[0] == 0 and t[-1] == 20.0
    # geometric sampling with ratio 1.25 (snapped to the step grid)
    assert 1.0 in t and 1.5 in t


def test_trajectory_strictly_increasing():
    traj = Trajectory(SimConfig(**SMALL))
    traj.append({"t": 1.0})
    with pytest.raises(ValueError):
        traj.append({"t": 1.0})


def test_simulate_short_run_diagnostics():
    traj = simulate(SimConfig(delta=0.05, t_end=20.0, n=256, length=100.0))
    for r in traj.rows:
        for key in ("l1_hat", "linf_hat", "l1_hat_c", "l1_hat_s"):
            assert math.isfinite(r[key])
        assert r["l1_hat_ws"] is None or math.isfinite(r["l1_hat_ws"])
    assert traj.rows[-1]["l1_hat"] < traj.rows[0]["l1_hat"]


def test_nonfinite_carries_state():
    # outside the perturbative regime a huge state blows up quickly
    g = Grid(64, 20.0)
    big = SimState(0.0, RealField(g, 50.0 * np.cos(2 * math.pi * g.x / 20.0)), RealField(g, np.zeros(64)))
    cfg = SimConfig(n=64, length=20.0, dt=1.0, t_end=200.0, track_slaving=False)
    with pytest.raises(NonFinite) as info, np.errstate(all="ignore"):
        simulate(cfg, initial=big)
    assert info.value.last_state is not None
    assert np.all(np.isfinite(info.value.last_state.vr.values))


def test_reconstruct_A():
    g = Grid(64, 10.0)
    re, im = reconstruct_A(SimState.zeros(g), Q_ECKHAUS)
    assert np.allclose(np.hypot(re.values, im.values), math.sqrt(2 / 3))
    re, im = reconstruct_A(SimState.zeros(g), 0.0)
    assert np.allclose(re.values, 1.0) and np.allclose(im.values, 0.0)
    s = initial_perturbation(SimConfig(**SMALL))
    re, im = reconstruct_A(s, Q_ECKHAUS)
    V = s.vr.values + 1j * s.vi.values
    assert np.allclose(np.hypot(re.values, im.values), math.sqrt(2 / 3) * np.abs(1 + V))


def test_pde_residual():
    g = Grid(128, 30.0)
    z = [SimState.zeros(g, t) for t in (0.0, 0.1, 0.2)]
    assert pde_residual(z) <= 1e-12
    with pytest.raises(InsufficientHistory):
        pde_residual(z[:2])
    cfg = SimConfig(delta=0.05, **SMALL)
    s = evolve(initial_perturbation(cfg), 5.0, 0.05)
    res = []
    for h in (0.02, 0.01):
        s1 = evolve(s, h, h / 4)
        s2 = evolve(s1, h, h / 4)
        res.append(pde_residual([s, s1, s2]))
    assert res[0] <= 1e-6 and res[1] < res[0]
    assert 3.5 <= res[0] / res[1] <= 4.5


def test_mode_split():
    g = Grid(128, 2 * math.pi * 20)
    proj = ModeProjector(g, Q_ECKHAUS, ProjectionSpec(1.0))
    amp = np.zeros(g.n, complex)
    amp[2] = 0.01
    split = mode_split(amp * proj.phi1, grid=g)
    assert np.max(np.abs(split.vs.coeffs)) <= 1e-15
    hi = np.zeros((2, g.n), complex)
    hi[:, np.abs(g.k) > 0.6] = 1.0
    assert np.all(mode_split(hi, grid=g).wc.coeffs == 0)
    rng = np.random.default_rng(5)
    v = rng.standard_normal((2, g.n)) + 1j * rng.standard_normal((2, g.n))
    assert np.max(np.abs(mode_split(v, grid=g).reassemble() - v)) <= 1e-12
