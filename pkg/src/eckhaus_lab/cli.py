"""Command line entry point ``eckhaus-lab``."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import asdict, fields
from pathlib import Path

import numpy as np

DERIVE_TARGETS = ("s2", "s3", "s4", "s5", "vsstar", "eigsystem")


def _poly_json(p):
    from .gradedcas.latex import emit_latex, monomial_key

    terms = []
    for mono, c in sorted(p.items(), key=lambda mc: monomial_key(mc[0])):
        terms.append({
            "monomial": [[s.base, s.n] for s in mono],
            "weight": str(sum((s.weight for s in mono), 0)),
            "coeff": [str(x) for x in c.parts],
        })
    return {"latex": emit_latex(p), "terms": terms}


def _jet_json(jet):
    from .gradedcas.latex import jet_latex

    return {"order": jet.order, "coeffs": [[str(x) for x in c.parts] for c in jet.coeffs],
            "latex": jet_latex(jet)}


def cmd_derive(args):
    from .gradedcas import derive_effective_equation, emit_latex, jet_eigsystem, jet_latex

    if args.target == "eigsystem":
        J = jet_eigsystem(args.order)
        named = {"lambda1": J.lambda1, "lambda2": J.lambda2, "a": J.phi1[0], "b": J.phi2[1],
                 "det": J.det, "S_inv_11": J.S_inv[0][0], "S_inv_12": J.S_inv[0][1]}
        if args.format == "json":
            print(json.dumps({k: _jet_json(v) for k, v in named.items()}, indent=2))
        else:
            for k, v in named.items():
                print(f"{k} = {jet_latex(v)}")
        return 0
    r = derive_effective_equation(args.order)
    p = r["vs_star" if args.target == "vsstar" else args.target]
    if args.format == "json":
        print(json.dumps({"target": args.target, **_poly_json(p)}, indent=2))
    else:
        print(emit_latex(p))
    return 0


def cmd_dispersion(args):
    from .dispersion import write_dispersion_csv

    write_dispersion_csv(args.out, args.q, args.kmax, args.samples)
    return 0


def cmd_simulate(args):
    from .harness import run_experiment

    out = run_experiment(args.config, args.out)
    print(out)
    return 0


def cmd_normalform_check(args):
    from .normalform import PROBE_TERMS, kernel_probe, marginal_relative_error

    report = {"exponents": {t: kernel_probe(t) for t in PROBE_TERMS},
              "marginal_relative_error": marginal_relative_error()}
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text)
    print(text)
    return 0


def cmd_profile(args):
    from .harness import _fmt
    from .selfsim import fixed_point_profile

    sol = fixed_point_profile(args.A)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    grid = sol.psi0.grid
    x = grid.x
    order = np.argsort(x)
    keep = order[np.abs(x[order]) <= args.xi_max]
    psi = sol.psi.values
    with open(out / "psi.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["xi", "psi"])
        for j in keep:
            w.writerow([_fmt(x[j]), _fmt(psi[j])])
    k = grid.k
    with open(out / "psi_hat.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "re", "im"])
        for j in np.argsort(k):
            c = sol.psi_hat.coeffs[j]
            w.writerow([_fmt(k[j]), _fmt(c.real), _fmt(c.imag)])
    (out / "residual.json").write_text(json.dumps(
        {"A": sol.A, "residual": sol.residual, "iterations": sol.iterations}, indent=2))
    (out / "iterations.log").write_text("".join(f"{i} {r:.6e}\n" for i, r in enumerate(sol.log)))
    print(f"residual {sol.residual:.3e} after {sol.iterations} iterations")
    return 0


def cmd_collapse(args):
    from .harness import _fmt
    from .selfsim import CollapseConfig, collapse_run

    data = json.loads(Path(args.config).read_text()) if args.config else {}
    out_dir = data.pop("out_dir", None)
    known = {f.name for f in fields(CollapseConfig)}
    bad = sorted(set(data) - known)
    if bad:
        print(f"unknown collapse config field(s): {', '.join(bad)}", file=sys.stderr)
        return 2
    cfg = CollapseConfig(**data)
    _, series = collapse_run(cfg)
    lines = ["t,e"] + [f"{_fmt(t)},{_fmt(e)}" for t, e in series]
    text = "\n".join(lines) + "\n"
    if out_dir:
        d = Path(out_dir)
        d.mkdir(parents=True, exist_ok=True)
        (d / "collapse.csv").write_text(text)
        (d / "collapse_config.json").write_text(json.dumps(asdict(cfg), indent=2, sort_keys=True))
    sys.stdout.write(text)
    return 0


def cmd_decay_fit(args):
    from .harness import fit_decay_exponent

    with open(args.csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    series = [(float(r["t"]), float(r[args.column])) for r in rows if r.get(args.column)]
    rep = fit_decay_exponent(series, (args.t_lo, args.t_hi), args.column)
    print(json.dumps(rep.to_json(), indent=2))
    return 0


def cmd_sweep(args):
    from .harness import sweep

    qs = [float(v) for v in args.q.split(",")]
    print(sweep(args.config, qs, args.out, args.threads))
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="eckhaus-lab", description="Perturbations of Ginzburg-Landau rolls "
                                "at the Eckhaus boundary: numerics and exact expansions.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("dispersion", help="tabulate lambda1, lambda2 over k")
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--kmax", type=float, default=2.0)
    s.add_argument("--samples", type=int, default=401)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_dispersion)

    s = sub.add_parser("simulate", help="run the perturbation equation from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--out", default=None, help="report directory (overrides out_dir)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("normalform-check", help="kernel exponents and marginal-term check")
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_normalform_check)

    s = sub.add_parser("derive", help="exact symbolic expansion terms")
    s.add_argument("--target", choices=DERIVE_TARGETS, required=True)
    s.add_argument("--format", choices=("latex", "json"), default="latex")
    s.add_argument("--order", type=int, default=8, help="k-jet order (1..8)")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("profile", help="self-similar profile of given mass")
    s.add_argument("--A", type=float, required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--xi-max", type=float, default=40.0)
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("collapse", help="canonical amplitude run and e(T) series")
    s.add_argument("--config", default=None)
    s.set_defaults(func=cmd_collapse)

    s = sub.add_parser("decay-fit", help="fit a decay exponent to a trajectory.csv column")
    s.add_argument("--csv", required=True)
    s.add_argument("--column", default="l1_hat")
    s.add_argument("--t-lo", type=float, default=1e2)
    s.add_argument("--t-hi", type=float, default=1e4)
    s.set_defaults(func=cmd_decay_fit)

    s = sub.add_parser("sweep", help="one report per q value")
    s.add_argument("--config", required=True)
    s.add_argument("--q", required=True, help="comma separated q values")
    s.add_argument("--out", required=True)
    s.add_argument("--threads", type=int, default=None)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    from .harness import ConfigError

    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
