"""Experiment orchestration: decay fits, weighted norms, twin runs, reports."""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from . import __version__
from .dispersion import ModeProjector, ProjectionSpec
from .glsim import COLUMNS, NonFinite, SimConfig, Trajectory, simulate
from .normalform import SlavingSolver
from .selfsim import NU_ECKHAUS, AmplitudeState, simulate_amplitude
from .spectral import RealField, ifft_spec

DEFAULT_WINDOW = (1e2, 1e4)
DEFAULT_NU_STAR = 3.5
MIN_SAMPLES = 8


class NonPositiveValue(ValueError):
    pass


class WindowTooSmall(ValueError):
    pass


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DecayReport:
    name: str
    window: tuple
    alpha: float
    residual: float
    samples: tuple

    def to_json(self):
        return {"name": self.name, "window": list(self.window), "alpha": self.alpha,
                "residual": self.residual, "samples": [list(s) for s in self.samples]}


def fit_decay_exponent(series, window=DEFAULT_WINDOW, name="series") -> DecayReport:
    """Least-squares alpha in value ~ C (1 + t)^(-alpha) over ``window``."""
    lo, hi = window
    if not lo < hi:
        raise WindowTooSmall("window must satisfy T_lo < T_hi")
    pts = [(float(t), float(v)) for t, v in series if v is not None and lo <= t <= hi]
    if len(pts) < MIN_SAMPLES:
        raise WindowTooSmall(f"{name}: {len(pts)} samples in [{lo}, {hi}], need {MIN_SAMPLES}")
    t = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(~(v > 0)):
        raise NonPositiveValue(f"{name}: non-positive values inside the fit window")
    x, y = np.log1p(t), np.log(v)
    slope, icpt = np.polyfit(x, y, 1)
    res = float(np.sqrt(np.mean((y - slope * x - icpt) ** 2)))
    return DecayReport(name, (lo, hi), float(-slope), res, tuple(pts))


# ---------------------------------------------------------------- weighted norms


@dataclass
class WeightedNorms:
    times: np.ndarray
    a_c: dict
    b_c: dict
    a_s: np.ndarray
    b_s: np.ndarray
    nu_star: float
    R: np.ndarray = field(default=None)

    def final(self):
        return {
            "nu_star": self.nu_star,
            "a_c": {str(k): float(v[-1]) for k, v in self.a_c.items()},
            "b_c": {str(k): float(v[-1]) for k, v in self.b_c.items()},
            "a_s": float(self.a_s[-1]),
            "b_s": float(self.b_s[-1]),
            "R": float(self.R[-1]),
        }

    def to_json(self):
        out = self.final()
        out["series"] = {"t": self.times.tolist(), "R": self.R.tolist()}
        return out


def split_transformed(v_full, grid, q, k0=1.0, solver=None):
    """(W^_c scalar, w^_s pair) for one spectral snapshot of shape (2, n)."""
    solver = solver or SlavingSolver(grid, q, ProjectionSpec(k0))
    proj = solver.proj
    pc = proj.project_c(v_full)
    ws = solver.ws_part(pc, v_full - pc)
    return proj.amplitude_c(v_full), ws


def weighted_norms(traj: Trajectory, nu_list=(0, 1, 2, 3), nu_star=DEFAULT_NU_STAR) -> WeightedNorms:
    """Running suprema of the weighted norms of (w_c, w_s).

    Needs a trajectory recorded with ``store_states``.  Snapshots where the
    slaving transform is unavailable contribute nothing to a_s, b_s.
    """
    if not nu_star < 4:
        raise ValueError("nu_star must be < 4")
    cfg = traj.config
    grid = cfg.grid
    if len(traj.states) != len(traj.rows):
        raise ValueError("trajectory has no stored states; rerun with store_states=True")
    solver = SlavingSolver(grid, cfg.q, ProjectionSpec(cfg.k0))
    absk = np.abs(grid.k)
    dk = grid.dk
    nus = sorted(set(nu_list) | {nu_star})
    t = traj.times
    raw_a = {nu: [] for nu in nus}
    raw_b = {nu: [] for nu in nus}
    raw_as, raw_bs = [], []
    for ti, v in zip(t, traj.states):
        wc, ws = split_transformed(v, grid, cfg.q, cfg.k0, solver)
        for nu in nus:
            weight = absk**nu if nu > 0 else np.ones_like(absk)
            m = weight * np.abs(wc)
            raw_a[nu].append((1 + ti) ** (nu / 4) * float(np.max(m)))
            raw_b[nu].append((1 + ti) ** ((nu + 1) / 4) * dk * float(np.sum(m)))
        if ws is None:
            raw_as.append(0.0)
            raw_bs.append(0.0)
        else:
            pw = np.sqrt(np.sum(np.abs(ws) ** 2, axis=0))
            raw_as.append((1 + ti) ** (nu_star / 4) * float(np.max(pw)))
            raw_bs.append((1 + ti) ** ((nu_star + 1) / 4) * dk * float(np.sum(pw)))
    a_c = {nu: np.maximum.accumulate(np.array(raw_a[nu])) for nu in nus}
    b_c = {nu: np.maximum.accumulate(np.array(raw_b[nu])) for nu in nus}
    a_s = np.maximum.accumulate(np.array(raw_as))
    b_s = np.maximum.accumulate(np.array(raw_bs))
    R = a_c[0] + b_c[0] + a_c[nu_star] + b_c[nu_star] + a_s + b_s
    return WeightedNorms(t, a_c, b_c, a_s, b_s, nu_star, R)


# ---------------------------------------------------------------- twin runs


def extract_wc(v_full, grid, q, k0=1.0) -> RealField:
    """Critical amplitude W_c(X) of one snapshot (real by symmetry)."""
    proj = ModeProjector(grid, q, ProjectionSpec(k0))
    return RealField(grid, ifft_spec(proj.amplitude_c(v_full), grid).real)


def compare_full_vs_amplitude(config: SimConfig, t0=10.0, t_end=1e3, amp_dt=0.05, nu=NU_ECKHAUS,
                              ratio=10 ** 0.25):
    """Relative sup-norm gap between W_c of the full run and the amplitude equation.

    Returns ``{"t": [...], "with_term": [...], "without_term": [...]}``; the
    second amplitude run drops the quadratic term (nu2 = 0).
    """
    times = [t0]
    while times[-1] * ratio <= t_end * (1 + 1e-12):
        times.append(times[-1] * ratio)
    if times[-1] < t_end:
        times.append(t_end)
    grid = config.grid
    # the full run must hit each sample time on its step grid
    cfg = SimConfig(**{**asdict(config), "t_end": t_end, "store_states": True, "track_slaving": False})
    full = simulate(cfg, sample_times=times)
    ft = full.times

    def snap(t):
        return int(np.argmin(np.abs(ft - t)))

    w_full = [extract_wc(full.states[snap(t)], grid, config.q, config.k0) for t in times]
    out = {"t": [float(ft[snap(t)]) for t in times]}
    start = AmplitudeState(out["t"][0], w_full[0])
    for key, nu2 in (("with_term", nu[1]), ("without_term", 0.0)):
        amp = simulate_amplitude(start, nu[0], nu2, out["t"][-1], amp_dt, sample_times=out["t"])
        rel = []
        for a, w in zip(amp, w_full):
            size = float(np.max(np.abs(w.values)))
            diff = float(np.max(np.abs(a.phi.values - w.values)))
            rel.append(diff / size if size > 0 else 0.0)
        out[key] = rel
    return out


# ---------------------------------------------------------------- persistence

CONFIG_KEYS = {f.name for f in fields(SimConfig)} | {"out_dir", "fit_window", "nu_star"}


def load_config(source) -> tuple:
    """Parse a JSON file path or dict into (SimConfig, extras)."""
    if isinstance(source, (str, Path)):
        try:
            data = json.loads(Path(source).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    else:
        data = dict(source)
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(data) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config field(s): {', '.join(unknown)}")
    extras = {k: data.pop(k) for k in ("out_dir", "fit_window", "nu_star") if k in data}
    types = {f.name: f.type for f in fields(SimConfig)}
    for key, val in data.items():
        want = types[key]
        ok = {"float": isinstance(val, (int, float)) and not isinstance(val, bool),
              "int": isinstance(val, int) and not isinstance(val, bool),
              "str": isinstance(val, str), "bool": isinstance(val, bool)}.get(want, True)
        if not ok:
            raise ConfigError(f"field {key!r}: expected {want}, got {type(val).__name__}")
    try:
        cfg = SimConfig(**data)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg, extras


def _fmt(v):
    return "" if v is None else f"{v:.17g}"


def write_trajectory_csv(traj: Trajectory, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in traj.rows:
            w.writerow([_fmt(r[c]) for c in COLUMNS])


def _decay_block(traj, window):
    out = {}
    for name in ("l1_hat", "linf_hat", "l1_hat_s", "l1_hat_ws"):
        try:
            out[name] = fit_decay_exponent(traj.series(name), window, name).to_json()
        except (WindowTooSmall, NonPositiveValue) as exc:
            out[name] = {"name": name, "error": str(exc)}
    return out


def run_experiment(source, out_dir=None) -> Path:
    """Simulate one config and write the four report files into ``out_dir``."""
    cfg, extras = load_config(source)
    out = Path(out_dir or extras.get("out_dir") or "report")
    window = tuple(extras.get("fit_window", DEFAULT_WINDOW))
    nu_star = float(extras.get("nu_star", DEFAULT_NU_STAR))
    cfg = SimConfig(**{**asdict(cfg), "store_states": True})
    out.mkdir(parents=True, exist_ok=True)
    start = time.perf_counter()
    status = "ok"
    try:
        traj = simulate(cfg)
    except NonFinite as exc:
        status = f"non-finite at t={exc.t}"
        traj = None
    wall = time.perf_counter() - start
    manifest = {"config": asdict(cfg), "version": __version__, "status": status, "wall_time_s": wall}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))
    if traj is None:
        return out
    write_trajectory_csv(traj, out / "trajectory.csv")
    (out / "decay.json").write_text(json.dumps(_decay_block(traj, window), indent=2, sort_keys=True))
    wn = weighted_norms(traj, nu_star=nu_star)
    (out / "weighted_norms.json").write_text(json.dumps(wn.to_json(), indent=2, sort_keys=True))
    return out


def sweep(source, q_values, out_dir, threads=None) -> Path:
    """One report per q; members run concurrently, the index is written last."""
    cfg, extras = load_config(source)
    base = {**asdict(cfg), **{k: v for k, v in extras.items() if k != "out_dir"}}
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if threads is None:
        threads = int(os.environ.get("ECKHAUS_LAB_THREADS", "1") or 1)
    jobs = [(i, float(q), out / f"q_{i:02d}") for i, q in enumerate(q_values)]

    def run(job):
        i, q, d = job
        try:
            run_experiment({**base, "q": q}, d)
            status = json.loads((d / "manifest.json").read_text())["status"]
        except ConfigError as exc:
            status = f"config error: {exc}"
        return {"q": q, "dir": d.name, "status": status}

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        entries = list(pool.map(run, jobs))
    (out / "index.json").write_text(json.dumps({"runs": entries}, indent=2, sort_keys=True))
    return out



def instability_probe(q=0.7, delta=1e-4, t_end=200.0, dt=0.5, n=2048, length=400.0, threshold=10.0):
    """Growth of ||V^||_Linf for an unstable q and the most amplified wavenumber.

    The measured wavenumber maximizes |v^(k, T)| / |v^(k, 0)| over modes
    where the initial spectrum is not negligible, at the first recorded time
    the growth factor exceeds ``threshold`` (or at t_end).
    """
    from .dispersion import most_unstable_wavenumber
    from .glsim import initial_perturbation

    cfg = SimConfig(q=q, n=n, length=length, dt=dt, t_end=t_end, delta=delta, output_stride=1,
                    track_slaving=False, store_states=True)
    v0 = initial_perturbation(cfg).spectral()
    traj = simulate(cfg)
    linf = traj.column("linf_hat")
    growth = linf / linf[0]
    hit = np.nonzero(growth >= threshold)[0]
    j = int(hit[0]) if hit.size else len(linf) - 1
    a0 = np.sqrt(np.sum(np.abs(v0) ** 2, axis=0))
    a1 = np.sqrt(np.sum(np.abs(traj.states[j]) ** 2, axis=0))
    k = cfg.grid.k
    ok = (a0 > 1e-3 * a0.max()) & (k > 0)
    ratio = np.where(ok, a1 / np.where(ok, a0, 1.0), 0.0)
    k_meas = float(k[int(np.argmax(ratio))])
    k_theory, lam_max = most_unstable_wavenumber(q)
    return {
        "growth": float(growth.max()),
        "t_threshold": float(traj.times[j]) if hit.size else None,
        "k_measured": k_meas,
        "k_theory": k_theory,
        "lambda_max": lam_max,
    }
