"""Slaving of the damped modes to the critical amplitude.

Split ``v^ = v^_c + v^_s`` with ``v^_c = W^_c phi1`` on |k| <= k0/2.  The
slaved part solves the algebraic equation

    0 = L_s v_s + P_s [ Q(v_c + v_s) + K(v_c) + 3 K(v_c, v_c, v_s) ],

where ``Q`` and ``K`` are the quadratic and cubic parts of the nonlinearity.
Terms of order two or more in ``v_s`` and of degree above three are not part
of the slaving relation; they stay in the equation for the remainder ``w_s``.
The equation is solved by Picard iteration ``v_s <- -L_s^{-1} P_s[...]``.

All products are formed in physical space with 1/2-rule truncation.  The
arithmetic never takes real parts, so every map here extends analytically to
complex amplitudes; the kernel probes rely on this.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import DEFAULT_K0, Q_ECKHAUS, ModeProjector, ProjectionSpec, _check_q
from .spectral import Grid, RealField, SpectralField, fft_phys, ifft_spec, spectral_l1

SMALLNESS = 0.1
SQRT3 = math.sqrt(3.0)


class NoConvergence(ArithmeticError):
    pass


class FitUnstable(ValueError):
    pass


@dataclass(frozen=True)
class SlavingSolution:
    vs_star: tuple
    iterations: int
    residual: float


@dataclass(frozen=True)
class TransformedState:
    wc: SpectralField
    ws: tuple


def _pair(arr, grid):
    return SpectralField(grid, arr[0]), SpectralField(grid, arr[1])


def _stack(pair):
    return np.stack([pair[0].coeffs, pair[1].coeffs])


class SlavingSolver:
    """Array-level slaving machinery on one grid (inputs have shape (2, n))."""

    def __init__(self, grid: Grid, q=Q_ECKHAUS, spec: ProjectionSpec | None = None,
                 dealias="1/2", tol=1e-11, max_iter=100):
        _check_q(q)
        self.grid, self.q = grid, q
        self.r2 = 1.0 - q * q
        self.proj = ModeProjector(grid, q, spec)
        self.mask = grid.dealias_mask(dealias).astype(float)
        self.tol, self.max_iter = tol, max_iter

    def _phys(self, c):
        return ifft_spec(c, self.grid)

    def _spec(self, u):
        return fft_phys(u, self.grid) * self.mask

    def forcing(self, vc, vs):
        """P_s of the retained nonlinear terms, in coefficient space."""
        c, s = self._phys(vc), self._phys(vs)
        r2 = self.r2
        v = c + s
        quad = np.stack([-r2 * (3 * v[0] ** 2 + v[1] ** 2), -r2 * (2 * v[0] * v[1])])
        cc = c[0] ** 2 + c[1] ** 2
        cs = c[0] * s[0] + c[1] * s[1]
        cubic = -r2 * (cc * c + 2 * cs * c + cc * s)
        return self.proj.project_s(self._spec(quad + cubic))

    def residual(self, vc, vs):
        r = self.proj.apply_symbol(vs) + self.forcing(vc, vs)
        return spectral_l1(r, self.grid)

    def solve(self, vc):
        vc = np.asarray(vc, dtype=complex)
        vs = np.zeros_like(vc)
        if not np.any(vc):
            return vs, 0, 0.0
        for it in range(1, self.max_iter + 1):
            new = -self.proj.solve_ls(self.forcing(vc, vs))
            change = spectral_l1(new - vs, self.grid)
            vs = new
            if change <= 0.1 * self.tol:
                res = self.residual(vc, vs)
                if res <= self.tol:
                    return vs, it, res
            if not np.isfinite(change):
                break
        raise NoConvergence(f"slaving iteration did not converge in {self.max_iter} steps")

    def ws_part(self, pc, ps):
        """ps - v_s*(pc), or None outside the contraction regime."""
        if spectral_l1(pc, self.grid) > SMALLNESS:
            return None
        try:
            vs, _, _ = self.solve(pc)
        except NoConvergence:
            return None
        return ps - vs

    def effective_c(self, vc):
        """Critical-mode nonlinearity <phi1*, N(v_c + v_s*(v_c))> on the cutoff."""
        vs, _, _ = self.solve(vc)
        v = self._phys(vc + vs)
        r2 = self.r2
        sq = v[0] ** 2 + v[1] ** 2
        n = np.stack([-r2 * (3 * v[0] ** 2 + v[1] ** 2 + v[0] * sq),
                      -r2 * (2 * v[0] * v[1] + v[1] * sq)])
        return self.proj.amplitude_c(self._spec(n))


def _check_small(vc, grid):
    size = spectral_l1(vc, grid)
    if size > SMALLNESS:
        raise ValueError(f"spectral L1 norm of v_c is {size:.3g}, above the contraction bound {SMALLNESS}")


def slaving_solve(vc, q=Q_ECKHAUS, spec: ProjectionSpec | None = None, tol=1e-11,
                  max_iter=100) -> SlavingSolution:
    """Solve for v_s*(v_c); ``vc`` is a pair of :class:`SpectralField`."""
    grid = vc[0].grid
    arr = _stack(vc)
    _check_small(arr, grid)
    solver = SlavingSolver(grid, q, spec, tol=tol, max_iter=max_iter)
    vs, it, res = solver.solve(arr)
    return SlavingSolution(_pair(vs, grid), it, res)


def change_coords(vc, vs, q=Q_ECKHAUS, spec: ProjectionSpec | None = None) -> TransformedState:
    """(v_c, v_s) -> (W_c, w_s) with w_c = v_c and w_s = v_s - v_s*(v_c)."""
    grid = vc[0].grid
    a = _stack(vc)
    _check_small(a, grid)
    solver = SlavingSolver(grid, q, spec)
    star, _, _ = solver.solve(a)
    ws = _stack(vs) - star
    return TransformedState(SpectralField(grid, solver.proj.amplitude_c(a)), _pair(ws, grid))


def inverse_coords(ts: TransformedState, q=Q_ECKHAUS, spec: ProjectionSpec | None = None):
    grid = ts.wc.grid
    solver = SlavingSolver(grid, q, spec)
    vc = solver.proj.lift_c(ts.wc.coeffs)
    star, _, _ = solver.solve(vc)
    return _pair(vc, grid), _pair(_stack(ts.ws) + star, grid)


def vs_star_closed(wc: RealField) -> RealField:
    """Long-wave expansion of the slaved amplitude through weight 1.

    V_s* = -W^2/2 - 3/4 (W^2)'' + (-W^4 - 8 sqrt3 W^2 W' - 9 W'^2)/8
    """
    grid = wc.grid
    w = wc.values
    k = grid.k
    c = np.fft.fft(w)
    dw = np.fft.ifft(1j * k * c).real
    w2 = w * w
    d2w2 = np.fft.ifft(-k * k * np.fft.fft(w2)).real
    out = -0.5 * w2 - 0.75 * d2w2 + (-w2 * w2 - 8 * SQRT3 * w2 * dw - 9 * dw * dw) / 8
    return RealField(grid, out)


def marginal_term(wc_hat: np.ndarray, grid: Grid) -> np.ndarray:
    """Coefficients of -3/2 sqrt3 d_X((d_X W)^2) for a (possibly complex) W."""
    k = grid.k
    dw = ifft_spec(1j * k * wc_hat, grid)
    return 1j * k * fft_phys(dw * dw, grid) * (-1.5 * SQRT3)


# ---------------------------------------------------------------- kernel probes

PROBE_TERMS = ("Mstar", "B2", "B3", "B4", "B5")
PROBE_DEGREE = {"Mstar": 2, "B2": 2, "B3": 3, "B4": 4, "B5": 5}
PROBE_GRID = Grid(256, 2 * math.pi * 100)
PROBE_AMPLITUDE = 1e-3


def homogeneous_part(solver: SlavingSolver, wc_hat, degree, radius=1.0, nodes=16):
    """Degree-``degree`` part of W -> effective_c(W phi1) by a Cauchy integral.

    Evaluates the map at ``radius * exp(2 pi i j / nodes) * W`` and extracts
    the Fourier coefficient in the rotation angle; the map is analytic in the
    scaling parameter, and with ``nodes`` points degrees ``degree + nodes*m``
    alias in, which is negligible for small radius.
    """
    total = 0.0
    for j in range(nodes):
        z = radius * np.exp(2j * math.pi * j / nodes)
        vc = solver.proj.lift_c(z * wc_hat)
        total = total + solver.effective_c(vc) * z ** (-degree)
    return total / nodes


def _probe_input(grid, k, amplitude):
    w = amplitude * np.cos(k * grid.x)
    return fft_phys(w, grid)


def probe_magnitude(term, k, q=Q_ECKHAUS, amplitude=PROBE_AMPLITUDE, grid=PROBE_GRID):
    if term not in PROBE_TERMS:
        raise ValueError(f"unknown probe term {term!r}")
    grid.index_of(k)
    solver = SlavingSolver(grid, q, ProjectionSpec(DEFAULT_K0))
    w = _probe_input(grid, k, amplitude)
    deg = PROBE_DEGREE[term]
    part = _homogeneous(solver, w, deg)
    if term == "B2":
        part = part - solver.proj.chi * marginal_term(w, grid)
    return spectral_l1(part, grid) / amplitude**deg


def _homogeneous(solver, w, deg):
    # fixed-count Picard keeps the map exactly analytic in the scaling
    return homogeneous_part(_FixedIterations(solver), w, deg)


class _FixedIterations:
    """Wraps a solver so that the slaving solve uses a fixed iteration count."""

    def __init__(self, solver, iterations=12):
        self._s, self.proj, self._n = solver, solver.proj, iterations

    def effective_c(self, vc):
        s = self._s
        vs = np.zeros_like(vc)
        for _ in range(self._n):
            vs = -s.proj.solve_ls(s.forcing(vc, vs))
        v = s._phys(vc + vs)
        r2 = s.r2
        sq = v[0] ** 2 + v[1] ** 2
        n = np.stack([-r2 * (3 * v[0] ** 2 + v[1] ** 2 + v[0] * sq),
                      -r2 * (2 * v[0] * v[1] + v[1] * sq)])
        return s.proj.amplitude_c(s._spec(n))


def fit_loglog(x, y, max_residual=0.05):
    """Slope of log y against log x; FitUnstable if ill-posed or non-linear."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if len(np.unique(x)) < 2:
        raise FitUnstable("need at least two distinct abscissae")
    if np.any(y <= 0) or np.any(x <= 0):
        raise FitUnstable("log-log fit needs positive data")
    lx, ly = np.log(x), np.log(y)
    slope, icpt = np.polyfit(lx, ly, 1)
    rms = float(np.sqrt(np.mean((ly - (slope * lx + icpt)) ** 2)))
    if rms > max_residual:
        raise FitUnstable(f"log-log residual {rms:.3g} exceeds {max_residual}")
    return float(slope), rms


def kernel_probe(term, k_list=(0.01, 0.02, 0.04, 0.08), q=Q_ECKHAUS):
    """Fitted exponent p in |term(W_k)| ~ k^p for monochromatic inputs."""
    ks = np.asarray(k_list, dtype=float)
    if len(np.unique(ks)) < 2:
        raise FitUnstable("kernel probe needs at least two distinct wavenumbers")
    if np.any(np.abs(ks) > 0.2):
        raise ValueError("probe wavenumbers must satisfy |k| <= 0.2")
    mags = [probe_magnitude(term, float(k), q) for k in ks]
    return fit_loglog(ks, mags)[0]


def marginal_relative_error(eps=0.01, k=0.01, q=Q_ECKHAUS, grid=PROBE_GRID):
    """Relative L1 mismatch between the quadratic effective term and the marginal law."""
    solver = SlavingSolver(grid, q, ProjectionSpec(DEFAULT_K0))
    w = _probe_input(grid, k, eps)
    quad = _homogeneous(solver, w, 2)
    ref = solver.proj.chi * marginal_term(w, grid)
    return spectral_l1(quad - ref, grid) / spectral_l1(ref, grid)
