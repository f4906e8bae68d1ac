"""Pseudo-spectral integration of the perturbation system around A_q.

Writing ``A = A_q (1 + V)`` with ``A_q = sqrt(1 - q^2) exp(i q X)`` turns
``A_T = A_XX + A - A|A|^2`` into a real system for ``v = (Re V, Im V)``:

    v_T = M(d_X) v + N(v),
    N_r = -r^2 (3 V_r^2 + V_i^2 + V_r^3 + V_r V_i^2),
    N_i = -r^2 (2 V_r V_i + V_r^2 V_i + V_i^3),     r^2 = 1 - q^2.

The linear symbol is diagonalized per Fourier mode by the (unitary) matrix
of normalized eigenvectors, and the system is advanced with ETDRK4 in those
eigencoordinates, so the linear part is propagated exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ._etd import ETDRK4Coefficients
from .dispersion import (
    DEFAULT_K0,
    Q_ECKHAUS,
    ModeProjector,
    ProjectionSpec,
    _branch_vectors,
    _check_q,
    eigenvalues,
)
from .spectral import Grid, RealField, SpectralField, fft_phys, spectral_l1, spectral_linf

MAX_DT = 2.0
MAX_DELTA = 0.2
IC_KINDS = ("gaussian", "random")
DEALIAS_RULES = ("none", "2/3", "1/2")


class DeltaTooLarge(ValueError):
    pass


class NonFinite(FloatingPointError):
    """Raised when the solution stops being finite.

    ``t`` is the time of the failing step and ``last_state`` the last finite
    state, kept for post-mortem inspection.
    """

    def __init__(self, t, last_state=None):
        super().__init__(f"non-finite values at t={t}")
        self.t = t
        self.last_state = last_state


class InsufficientHistory(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    q: float = Q_ECKHAUS
    n: int = 2048
    length: float = 400.0
    dt: float = 0.5
    t_end: float = 100.0
    delta: float = 0.05
    ic_kind: str = "gaussian"
    dealias: str = "1/2"
    # 0 selects geometric sampling t = ratio^j
    output_stride: int = 0
    seed: int = 0
    ic_width: float = 2.0
    ic_tilt: float = 0.0
    ic_phase: float = math.pi / 4
    sample_ratio: float = 1.25
    k0: float = DEFAULT_K0
    track_slaving: bool = True
    store_states: bool = False

    def __post_init__(self):
        _check_q(self.q)
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.dt > MAX_DT:
            raise ValueError(f"dt must be <= {MAX_DT}")
        if not self.t_end >= 0:
            raise ValueError("t_end must be >= 0")
        if not self.delta >= 0:
            raise ValueError("delta must be >= 0")
        if self.ic_kind not in IC_KINDS:
            raise ValueError(f"ic_kind must be one of {IC_KINDS}")
        if self.dealias not in DEALIAS_RULES:
            raise ValueError(f"dealias must be one of {DEALIAS_RULES}")
        if self.output_stride < 0:
            raise ValueError("output_stride must be >= 0")
        if not self.sample_ratio > 1:
            raise ValueError("sample_ratio must exceed 1")
        self.grid  # validates n and length

    @property
    def grid(self) -> Grid:
        return Grid(self.n, self.length)


@dataclass(frozen=True)
class SimState:
    t: float
    vr: RealField
    vi: RealField

    def __post_init__(self):
        if self.vr.grid != self.vi.grid:
            raise ValueError("vr and vi must share one grid")

    @property
    def grid(self) -> Grid:
        return self.vr.grid

    def spectral(self) -> np.ndarray:
        """Coefficients of (V_r, V_i), shape (2, n)."""
        return fft_phys(np.stack([self.vr.values, self.vi.values]), self.grid)

    @classmethod
    def zeros(cls, grid, t=0.0):
        z = np.zeros(grid.n)
        return cls(t, RealField(grid, z), RealField(grid, z))


COLUMNS = ("t", "l1_hat", "linf_hat", "l1_hat_c", "l1_hat_s", "l1_hat_ws")


@dataclass
class Trajectory:
    config: SimConfig
    rows: list = field(default_factory=list)
    # spectral snapshots (2, n) at the sample times when store_states is on
    states: list = field(default_factory=list)
    final_state: SimState | None = None

    def append(self, row, state=None):
        if self.rows and not row["t"] > self.rows[-1]["t"]:
            raise ValueError("trajectory times must increase strictly")
        self.rows.append(row)
        if state is not None:
            self.states.append(state)

    def column(self, name) -> np.ndarray:
        return np.array([np.nan if r[name] is None else r[name] for r in self.rows], dtype=float)

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    def series(self, name):
        return [(r["t"], r[name]) for r in self.rows if r[name] is not None]


# ---------------------------------------------------------------- half spectrum


class _Half:
    """rfft-based transforms in the 1/(2 pi) coefficient convention."""

    def __init__(self, grid: Grid, dealias: str):
        self.grid = grid
        nh = grid.n // 2 + 1
        self.k = grid.dk * np.arange(nh)
        self.scale = (grid.dx / (2 * np.pi)) * np.exp(-1j * self.k * grid.x[0])
        keep = grid.dealias_mask(dealias)[:nh].copy()
        keep[-1] = False  # Nyquist
        self.mask = keep.astype(float)

    def fwd(self, u):
        return self.scale * np.fft.rfft(u, axis=-1)

    def inv(self, c):
        return np.fft.irfft(c / self.scale, n=self.grid.n, axis=-1)

    def to_full(self, c):
        n = self.grid.n
        full = np.zeros(c.shape[:-1] + (n,), dtype=complex)
        m = n // 2
        full[..., :m] = c[..., :m]
        full[..., m + 1:] = np.conj(c[..., m - 1:0:-1])
        return full

    def from_full(self, c):
        return np.array(c[..., : self.grid.n // 2 + 1], dtype=complex)


def nonlinear_terms(vr, vi, q):
    r2 = 1.0 - q * q
    sq = vr * vr + vi * vi
    nr = -r2 * (3.0 * vr * vr + vi * vi + vr * sq)
    ni = -r2 * (2.0 * vr * vi + vi * sq)
    return nr, ni


def nonlinearity(state: SimState, q=Q_ECKHAUS, dealias="1/2"):
    """Pointwise N(v) followed by spectral truncation with ``dealias``."""
    half = _Half(state.grid, dealias)
    nr, ni = nonlinear_terms(state.vr.values, state.vi.values, q)
    c = half.fwd(np.stack([nr, ni]))
    out = half.inv(c * half.mask)
    return RealField(state.grid, out[0]), RealField(state.grid, out[1])


class GLIntegrator:
    """ETDRK4 stepper in per-mode eigencoordinates."""

    def __init__(self, grid: Grid, q, dt, dealias="1/2", linear_only=False):
        _check_q(q)
        if not 0 < dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}]")
        self.grid, self.q, self.dt, self.linear_only = grid, q, dt, linear_only
        self.half = _Half(grid, dealias)
        k = self.half.k
        phi1, phi2 = _branch_vectors(k, q)
        phi1 = phi1 / np.linalg.norm(phi1, axis=-1, keepdims=True)
        phi2 = phi2 / np.linalg.norm(phi2, axis=-1, keepdims=True)
        # U[:, j, :] is the j-th eigenvector; M Hermitian makes U unitary
        self.U = np.stack([phi1.T, phi2.T], axis=1)  # (component, branch, k)
        lam1, lam2 = eigenvalues(k, q)
        self.lam = np.stack([lam1, lam2])
        self.coef = ETDRK4Coefficients(self.lam, dt)

    def to_eig(self, v):
        return np.einsum("cbk,ck->bk", np.conj(self.U), v)

    def from_eig(self, u):
        return np.einsum("cbk,bk->ck", self.U, u)

    def _nonlinear(self, u):
        if self.linear_only:
            return np.zeros_like(u)
        h = self.half
        phys = h.inv(self.from_eig(u))
        nr, ni = nonlinear_terms(phys[0], phys[1], self.q)
        return self.to_eig(h.fwd(np.stack([nr, ni])) * h.mask)

    def advance(self, v, steps=1):
        """Advance half-spectrum coefficients ``v`` (2, n/2+1) by ``steps``."""
        u = self.to_eig(v)
        for _ in range(steps):
            u = self.coef.step(u, self._nonlinear)
        return self.from_eig(u)


@lru_cache(maxsize=32)
def _integrator(grid, q, dt, dealias, linear_only):
    return GLIntegrator(grid, q, dt, dealias, linear_only)


def _state_from_half(half, v, t):
    phys = half.inv(v)
    return SimState(t, RealField(half.grid, phys[0]), RealField(half.grid, phys[1]))


def step(state: SimState, dt, q=Q_ECKHAUS, dealias="1/2", linear_only=False) -> SimState:
    """One ETDRK4 step; raises :class:`NonFinite` if the result is not finite."""
    if dt > MAX_DT:
        raise ValueError(f"dt must be <= {MAX_DT}")
    integ = _integrator(state.grid, float(q), float(dt), dealias, bool(linear_only))
    v = integ.half.fwd(np.stack([state.vr.values, state.vi.values]))
    v = integ.advance(v)
    if not np.all(np.isfinite(v)):
        raise NonFinite(state.t + dt, state)
    return _state_from_half(integ.half, v, state.t + dt)


# ---------------------------------------------------------------- initial data


def _raw_perturbation(config: SimConfig):
    x = config.grid.x
    if config.ic_kind == "gaussian":
        env = np.exp(-0.5 * (x / config.ic_width) ** 2)
        return env * np.exp(1j * (config.ic_tilt * x + config.ic_phase))
    rng = np.random.default_rng(config.seed)
    # smooth random field localized on the Gaussian envelope scale
    noise = rng.standard_normal(x.size) + 1j * rng.standard_normal(x.size)
    k = config.grid.k
    smooth = np.fft.ifft(np.fft.fft(noise) * np.exp(-0.5 * (k * config.ic_width) ** 2))
    return smooth * np.exp(-0.5 * (x / (4.0 * config.ic_width)) ** 2)


def initial_perturbation(config: SimConfig) -> SimState:
    """Localized V_0 rescaled so that ||V_0^||_L1 + ||V_0^||_Linf = delta."""
    if config.delta > MAX_DELTA:
        raise DeltaTooLarge(f"delta={config.delta} exceeds {MAX_DELTA}")
    grid = config.grid
    if config.delta == 0:
        return SimState.zeros(grid)
    V = _raw_perturbation(config)
    mask = grid.dealias_mask(config.dealias)
    c = fft_phys(np.stack([V.real, V.imag]), grid) * mask
    size = spectral_l1(c, grid) + spectral_linf(c)
    c *= config.delta / size
    half = _Half(grid, config.dealias)
    return _state_from_half(half, half.from_full(c), 0.0)


# ---------------------------------------------------------------- mode split


@dataclass(frozen=True)
class ModeSplit:
    """Coordinates of v^ in the eigenbasis.

    ``wc`` and ``vs`` are scalar amplitudes along phi1 and phi2 on
    |k| <= k0/2; ``outside`` holds v^ itself on |k| > k0/2.
    """

    wc: SpectralField
    vs: SpectralField
    outside: np.ndarray
    q: float
    k0: float

    def reassemble(self) -> np.ndarray:
        proj = ModeProjector(self.wc.grid, self.q, ProjectionSpec(self.k0))
        inside = proj.chi * (self.wc.coeffs * proj.phi1 + self.vs.coeffs * proj.phi2)
        return inside + self.outside


def mode_split(state: SimState | np.ndarray, q=Q_ECKHAUS, k0=DEFAULT_K0, grid=None) -> ModeSplit:
    if isinstance(state, SimState):
        grid, v = state.grid, state.spectral()
    else:
        v = np.asarray(state)
    proj = ModeProjector(grid, q, ProjectionSpec(k0))
    wc = proj.amplitude_c(v)
    vs = proj.amplitude_s(v)
    outside = (1.0 - proj.chi) * v
    return ModeSplit(SpectralField(grid, wc), SpectralField(grid, vs), outside, q, k0)


# ---------------------------------------------------------------- simulate


def _sample_steps(config: SimConfig, sample_times=None):
    total = int(math.floor(config.t_end / config.dt + 1e-9))
    if sample_times is not None:
        steps = {min(total, max(0, int(round(t / config.dt)))) for t in sample_times}
    elif config.output_stride:
        steps = set(range(0, total + 1, config.output_stride))
    else:
        steps = {0}
        t = 1.0
        while t <= config.t_end:
            steps.add(min(total, max(1, int(round(t / config.dt)))))
            t *= config.sample_ratio
    steps.add(total)
    return sorted(steps), total


def _diagnostics(t, v_full, grid, config, proj, slaver):
    pc = proj.project_c(v_full)
    ps = v_full - pc
    row = {
        "t": t,
        "l1_hat": spectral_l1(v_full, grid),
        "linf_hat": spectral_linf(v_full),
        "l1_hat_c": spectral_l1(pc, grid),
        "l1_hat_s": spectral_l1(ps, grid),
        "l1_hat_ws": None,
    }
    if slaver is not None:
        ws = slaver.ws_part(pc, ps)
        row["l1_hat_ws"] = None if ws is None else spectral_l1(ws, grid)
    return row


def simulate(config: SimConfig, initial: SimState | None = None, sample_times=None) -> Trajectory:
    """Run to ``t_end`` and record diagnostics at the sample times.

    ``l1_hat_ws`` is the L1 norm of ws = P_s v^ - v_s*(P_c v^) and is left
    empty whenever the slaving equation is outside its contraction regime.
    """
    from .normalform import SlavingSolver  # normalform imports this module

    grid = config.grid
    state = initial if initial is not None else initial_perturbation(config)
    half = _Half(grid, config.dealias)
    proj = ModeProjector(grid, config.q, ProjectionSpec(config.k0))
    slaver = SlavingSolver(grid, config.q, ProjectionSpec(config.k0)) if config.track_slaving else None
    integ = _integrator(grid, float(config.q), float(config.dt), config.dealias, False)

    v = half.fwd(np.stack([state.vr.values, state.vi.values])) * half.mask
    t0 = state.t
    steps, total = _sample_steps(config, sample_times)
    traj = Trajectory(config)
    done = 0
    for s in steps:
        if s > done:
            u = integ.to_eig(v)
            for j in range(done, s):
                u_new = integ.coef.step(u, integ._nonlinear)
                if not np.all(np.isfinite(u_new)):
                    last = _state_from_half(half, integ.from_eig(u), t0 + j * config.dt)
                    raise NonFinite(t0 + (j + 1) * config.dt, last)
                u = u_new
            v = integ.from_eig(u)
            done = s
        full = half.to_full(v)
        t = t0 + s * config.dt
        traj.append(_diagnostics(t, full, grid, config, proj, slaver),
                    full if config.store_states else None)
    # remaining fraction of a step to reach t_end exactly
    rest = config.t_end - total * config.dt
    if rest > 1e-9 * config.dt:
        v = _integrator(grid, float(config.q), float(rest), config.dealias, False).advance(v)
        if not np.all(np.isfinite(v)):
            raise NonFinite(t0 + config.t_end, _state_from_half(half, v, t0 + total * config.dt))
        full = half.to_full(v)
        traj.append(_diagnostics(t0 + config.t_end, full, grid, config, proj, slaver),
                    full if config.store_states else None)
    traj.final_state = _state_from_half(half, v, traj.rows[-1]["t"])
    return traj


def evolve(state: SimState, t_span, dt, q=Q_ECKHAUS, dealias="1/2"):
    """Advance ``state`` by ``t_span`` with fixed steps; returns the new state."""
    nsteps = max(1, int(round(t_span / dt)))
    h = t_span / nsteps
    integ = _integrator(state.grid, float(q), float(h), dealias, False)
    v = integ.half.fwd(np.stack([state.vr.values, state.vi.values]))
    v = integ.advance(v, nsteps)
    if not np.all(np.isfinite(v)):
        raise NonFinite(state.t + t_span, state)
    return _state_from_half(integ.half, v, state.t + t_span)


# ---------------------------------------------------------------- reconstruction


def reconstruct_A(state: SimState, q=Q_ECKHAUS):
    """Return (Re A, Im A) on the grid for ``A = A_q (1 + V)``."""
    A = _complex_A(state, q)
    return RealField(state.grid, A.real), RealField(state.grid, A.imag)


def _complex_A(state, q):
    x = state.grid.x
    aq = math.sqrt(1.0 - q * q) * np.exp(1j * q * x)
    return aq * (1.0 + state.vr.values + 1j * state.vi.values)


def pde_residual(states, q=Q_ECKHAUS) -> float:
    """Max-norm residual of ``A_T - A_XX - A + A|A|^2`` at the middle state.

    ``states`` are three consecutive equally spaced states.  X-derivatives
    are taken spectrally on V (A_q is not periodic on the grid, so the
    product rule is applied analytically), T-derivatives by centered
    differences.
    """
    if len(states) < 3:
        raise InsufficientHistory("need three consecutive states")
    s0, s1, s2 = states[-3:]
    h1, h2 = s1.t - s0.t, s2.t - s1.t
    if not (h1 > 0 and abs(h1 - h2) <= 1e-9 * h1):
        raise InsufficientHistory("states must be consecutive and equally spaced")
    grid = s1.grid
    A0, A1, A2 = (_complex_A(s, q) for s in (s0, s1, s2))
    At = (A2 - A0) / (2.0 * h1)
    V = s1.vr.values + 1j * s1.vi.values
    c = np.fft.fft(V)
    k = grid.k.copy()
    dV = np.fft.ifft(1j * k * c)
    d2V = np.fft.ifft(-k * k * c)
    x = grid.x
    aq = math.sqrt(1.0 - q * q) * np.exp(1j * q * x)
    Axx = aq * (d2V + 2j * q * dV - q * q * (1.0 + V))
    res = At - Axx - A1 + A1 * np.abs(A1) ** 2
    return float(np.max(np.abs(res)))


def with_overrides(config: SimConfig, **kw) -> SimConfig:
    return replace(config, **kw)
