"""Amplitude equation and its self-similar profiles.

The amplitude equation is

    phi_T = -nu1 phi_XXXX + nu2 (phi_X^2)_X,      nu1 > 0,

with (nu1, nu2) = (3/4, -3 sqrt3 / 2) at the Eckhaus boundary and
(1, -1) in canonical form.  Self-similar solutions
``phi = T^{-1/4} psi(X T^{-1/4})`` of the canonical equation solve

    0 = -psi'''' + psi/4 + xi psi'/4 - ((psi')^2)',

which in Fourier variables reads ``L psi^ = N^`` with
``L psi^ = -k^4 psi^ - k psi^'/4``.  Writing ``psi = A psi0 + psi_m`` with
``psi0^ = exp(-k^4)/(2 pi)`` (unit mass) and ``psi_m`` mass-free gives the
fixed point problem ``psi_m = L^{-1} N(A psi0 + psi_m)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from ._etd import ETDRK4Coefficients
from .spectral import Grid, RealField, SpectralField, evaluate_at, fft_phys, ifft_spec

NU_ECKHAUS = (0.75, -1.5 * math.sqrt(3.0))
NU_CANONICAL = (1.0, -1.0)
PROFILE_GRID = Grid(16384, 2 * math.pi * 16384 / 16.0)  # k in [-8, 8), dk = 1/1024
MAX_PROFILE_A = 0.3


class NonFinite(FloatingPointError):
    pass


class DegenerateCoefficients(ValueError):
    pass


class MassNotZero(ValueError):
    pass


class NoConvergence(ArithmeticError):
    pass


@dataclass(frozen=True)
class AmplitudeState:
    t: float
    phi: RealField


@dataclass(frozen=True)
class ProfileSolution:
    A: float
    psi0: RealField
    psi_minus: RealField
    residual: float
    iterations: int
    psi_hat: SpectralField
    log: tuple = ()

    @property
    def psi(self) -> RealField:
        return RealField(self.psi0.grid, self.A * self.psi0.values + self.psi_minus.values)


# ---------------------------------------------------------------- time evolution


class AmplitudeIntegrator:
    def __init__(self, grid: Grid, nu1, nu2, dt, dealias="2/3"):
        if not nu1 > 0:
            raise DegenerateCoefficients("nu1 must be positive")
        self.grid, self.nu1, self.nu2, self.dt = grid, nu1, nu2, dt
        k = grid.k.copy()
        self.ik = 1j * k
        self.ik[grid.nyquist_index] = 0.0
        self.mask = grid.dealias_mask(dealias).astype(float)
        self.coef = ETDRK4Coefficients(-nu1 * k**4, dt)

    def _nonlinear(self, c):
        if self.nu2 == 0:
            return np.zeros_like(c)
        dphi = np.fft.ifft(self.ik * c).real
        # dX of (phi_X)^2; the k = 0 coefficient is exactly zero
        return self.nu2 * self.ik * self.mask * np.fft.fft(dphi * dphi)

    def advance(self, c, steps):
        for _ in range(steps):
            c = self.coef.step(c, self._nonlinear)
        return c


def simulate_amplitude(initial: AmplitudeState, nu1=NU_ECKHAUS[0], nu2=NU_ECKHAUS[1], t_end=100.0,
                       dt=0.1, sample_times=None):
    """Evolve the amplitude equation; returns a list of AmplitudeState.

    ``sample_times`` (absolute times, snapped to the step grid) default to
    the start and end.  Internally raw FFT coefficients are used, so the
    k = 0 coefficient (the mass) is carried through unchanged.
    """
    grid = initial.phi.grid
    integ = AmplitudeIntegrator(grid, nu1, nu2, dt)
    t0 = initial.t
    total = int(round((t_end - t0) / dt))
    if sample_times is None:
        targets = [0, total]
    else:
        targets = sorted({min(total, max(0, int(round((s - t0) / dt)))) for s in sample_times})
    c = np.fft.fft(initial.phi.values)
    out, done = [], 0
    for s in targets:
        if s > done:
            c = integ.advance(c, s - done)
            done = s
            if not np.all(np.isfinite(c)):
                raise NonFinite(f"amplitude equation blew up before t={t0 + s * dt}")
        out.append(AmplitudeState(t0 + s * dt, RealField(grid, np.fft.ifft(c).real)))
    return out


def mass(phi: RealField) -> float:
    return float(np.sum(phi.values) * phi.grid.dx)


def canonical_rescale(nu1, nu2):
    """Scale factors (a, b, c) with phi~ = a phi, X = b x~, T = c t~.

    Substitution gives c nu1 = b^4 and a b^3 = -c nu2; b = 1 is chosen.
    """
    if not nu1 > 0:
        raise DegenerateCoefficients("nu1 must be positive")
    if nu2 == 0:
        raise DegenerateCoefficients("nu2 must be nonzero")
    b = 1.0
    c = b**4 / nu1
    a = -c * nu2 / b**3
    return a, b, c


def canonical_residual(states, a, c, grid_scale=1.0):
    """Max residual of the canonical PDE for phi~ = a phi(x, c t~).

    ``states`` are three equally spaced AmplitudeStates of the original
    equation (b = 1 assumed, so the spatial grid carries over).
    """
    s0, s1, s2 = states
    h = (s1.t - s0.t) / c
    grid = s1.phi.grid
    f0, f1, f2 = (a * s.phi.values for s in (s0, s1, s2))
    k = grid.k
    ft = (f2 - f0) / (2 * h)
    c1 = np.fft.fft(f1)
    d4 = np.fft.ifft(k**4 * c1).real
    d1 = np.fft.ifft(1j * k * c1).real
    nl = np.fft.ifft(1j * k * np.fft.fft(d1 * d1)).real
    return float(np.max(np.abs(ft + d4 + nl)))


# ---------------------------------------------------------------- linear profile


def phi_lin(grid: Grid = PROFILE_GRID) -> SpectralField:
    """Linear self-similar profile exp(-3/4 kappa^4) on the kappa grid."""
    return SpectralField(grid, np.exp(-0.75 * grid.k**4))


# ---------------------------------------------------------------- profile operators


def _natural(a):
    return np.fft.fftshift(a)


def _fft_order(a):
    return np.fft.ifftshift(a)


def _d_dk(f, h):
    """4th-order centered difference on a natural-order array, zero padded."""
    p = np.concatenate([np.zeros(2, f.dtype), f, np.zeros(2, f.dtype)])
    return (p[:-4] - 8 * p[1:-3] + 8 * p[3:-1] - p[4:]) / (12 * h)


def apply_L(psi_hat: SpectralField) -> SpectralField:
    """-k^4 psi^ - (k/4) psi^' with the k-derivative by finite differences."""
    grid = psi_hat.grid
    k = _natural(grid.k)
    c = _natural(psi_hat.coeffs)
    out = -k**4 * c - 0.25 * k * _d_dk(c, grid.dk)
    return SpectralField(grid, _fft_order(out))


def invert_L(f_hat: SpectralField) -> SpectralField:
    """Mass-free solution u^ of ``L u^ = f^``.

    u^(k) = -4 exp(-k^4) int_0^k exp(l^4) f^(l) / l dl, with the removable
    singularity at l = 0 filled by f^'(0).
    """
    grid = f_hat.grid
    c = _natural(f_hat.coeffs)
    k = _natural(grid.k)
    m0 = int(np.argmin(np.abs(k)))
    if abs(c[m0]) > 1e-12:
        raise MassNotZero(f"f^(0) = {c[m0]:.3e}; project onto the mass-free part first")
    h = grid.dk
    y = np.empty_like(c)
    nz = np.arange(k.size) != m0
    y[nz] = c[nz] / k[nz]
    y[m0] = _d_dk(c, h)[m0]
    out = np.zeros_like(c)
    # integrate outward from k = 0 on each side
    out[m0:] = _factor_integral(k[m0:], y[m0:], h)
    out[m0::-1] = _factor_integral(k[m0::-1], y[m0::-1], -h)
    out = -4.0 * out
    out[m0] = 0.0
    return SpectralField(grid, _fft_order(out))


def _factor_integral(k, y, h, chunk=64):
    """exp(-k^4) * int_0^k exp(l^4) y(l) dl along an outward k-array.

    The integrating factor is renormalized at the start of every chunk so
    nothing overflows for large |k|.
    """
    out = np.zeros_like(y)
    acc = 0.0
    a = 0
    n = k.size
    while a < n - 1:
        b = min(a + chunk, n - 1)
        if n - 1 - b < 2:
            b = n - 1
        seg = slice(a, b + 1)
        shift = k[seg] ** 4 - k[a] ** 4
        cum = _cumsimpson(np.exp(shift) * y[seg], h)
        out[seg] = np.exp(-shift) * (acc + cum)
        acc = out[b]
        a = b
    return out


def _cumsimpson(y, h):
    return (cumulative_simpson(y.real, dx=h, initial=0.0)
            + 1j * cumulative_simpson(y.imag, dx=h, initial=0.0))


def psi0_hat(grid: Grid = PROFILE_GRID) -> np.ndarray:
    return np.exp(-grid.k**4) / (2 * np.pi)


def nonlinear_hat(psi_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Coefficients of ((psi')^2)'; the k = 0 coefficient vanishes exactly."""
    ik = 1j * grid.k
    d = ifft_spec(ik * psi_hat, grid).real
    out = ik * fft_phys(d * d, grid)
    out[grid.nyquist_index] = 0.0
    return out


def p0_project(u: RealField):
    """Split u into (mass) * psi0 and a mass-free remainder."""
    grid = u.grid
    m = float(np.sum(u.values) * grid.dx)
    p0 = ifft_spec(psi0_hat(grid), grid).real
    # discrete mass of psi0 is 1 up to round-off; normalize exactly anyway
    p0 = p0 / (np.sum(p0) * grid.dx)
    comp = m * p0
    return RealField(grid, comp), RealField(grid, u.values - comp)


def fixed_point_profile(A, grid: Grid = PROFILE_GRID, tol=1e-10, max_iter=200) -> ProfileSolution:
    """Picard iteration for psi_m = L^{-1} ((A psi0 + psi_m)')^2)'."""
    if abs(A) > MAX_PROFILE_A:
        raise ValueError(f"|A| must be <= {MAX_PROFILE_A}")
    base = A * psi0_hat(grid)
    pm = np.zeros(grid.n, dtype=complex)
    log = []
    res = math.inf
    for it in range(max_iter + 1):
        psi = base + pm
        nl = nonlinear_hat(psi, grid)
        res = float(np.max(np.abs(apply_L(SpectralField(grid, psi)).coeffs - nl)))
        log.append(res)
        if res <= tol:
            break
        if it == max_iter or not math.isfinite(res):
            raise NoConvergence(f"profile iteration stalled at residual {res:.3e}")
        pm = invert_L(SpectralField(grid, nl)).coeffs
    psi0 = RealField(grid, ifft_spec(psi0_hat(grid), grid).real)
    pmin = RealField(grid, ifft_spec(pm, grid).real)
    return ProfileSolution(float(A), psi0, pmin, res, it, SpectralField(grid, base + pm), tuple(log))


def profile_values(sol: ProfileSolution, xi):
    return evaluate_at(sol.psi_hat.coeffs, sol.psi_hat.grid, xi).real


# ---------------------------------------------------------------- collapse


def sample_on_grid(sol: ProfileSolution, grid: Grid) -> RealField:
    """The profile psi*(x) sampled on a simulation grid."""
    return RealField(grid, profile_values(sol, grid.x))


def collapse_metric(states, A=None, profile: ProfileSolution | None = None, xi=None):
    """e(T) = sup_xi |T^{1/4} phi(xi T^{1/4}, T) - psi*(xi)| per state.

    ``states`` are AmplitudeStates of the canonical equation.  A defaults
    to the conserved mass of the first state.
    """
    if profile is None:
        if A is None:
            A = mass(states[0].phi)
        profile = fixed_point_profile(A)
    if xi is None:
        xi = np.linspace(-12.0, 12.0, 481)
    target = profile_values(profile, xi)
    out = []
    for s in states:
        g = s.phi.grid
        s4 = s.t**0.25
        coeffs = fft_phys(s.phi.values, g)
        vals = evaluate_at(coeffs, g, xi * s4).real * s4
        out.append((s.t, float(np.max(np.abs(vals - target)))))
    return out


@dataclass(frozen=True)
class CollapseConfig:
    A: float = 0.05
    sigma: float = 0.3
    n: int = 1024
    length: float = 400.0
    t0: float = 1.0
    t_end: float = 1000.0
    dt: float = 0.05
    ratio: float = 10 ** 0.25


def gaussian_of_mass(grid: Grid, A, sigma) -> RealField:
    x = grid.x
    g = np.exp(-0.5 * (x / sigma) ** 2)
    return RealField(grid, A * g / (np.sum(g) * grid.dx))


def collapse_run(cfg: CollapseConfig = CollapseConfig()):
    """Canonical-equation run from a narrow Gaussian of mass A.

    Returns ``(states, series)`` with series the (t, e(t)) pairs at
    geometrically spaced times starting at t0.
    """
    grid = Grid(cfg.n, cfg.length)
    times = [cfg.t0]
    while times[-1] * cfg.ratio <= cfg.t_end * (1 + 1e-12):
        times.append(times[-1] * cfg.ratio)
    if times[-1] < cfg.t_end:
        times.append(cfg.t_end)
    start = AmplitudeState(cfg.t0, gaussian_of_mass(grid, cfg.A, cfg.sigma))
    states = simulate_amplitude(start, *NU_CANONICAL, t_end=cfg.t_end, dt=cfg.dt, sample_times=times)
    return states, collapse_metric(states, A=cfg.A)
