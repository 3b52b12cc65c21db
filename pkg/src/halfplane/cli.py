"""Command-line interface.

Exit codes: 0 on success, 1 on invalid input, 2 on numerical abort.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from contextlib import contextmanager
from typing import List, Optional

import numpy as np

from .boundary import boundary_sweep
from .config import ConfigError, ExperimentConfig, load_config
from .dispersion import Material, dispersion_table
from .exact import RayleighWaveSpec, rayleigh_field, solve_reflection
from .harness import (
    check_budget,
    convergence_study,
    modeconv_study,
    predict_vs_measure,
    scaling_study,
)
from .solver import NumericalInstability, run, write_field_csv

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2

DEFAULT_PAIRS = {2: ["0.1,40", "0.01,126"], 4: ["0.1,12", "0.001,38"]}


def _fmt(x) -> str:
    return f"{float(x):.17g}"


def _ratio(text: str) -> float:
    if text.lower() in ("inf", "infinity"):
        return math.inf
    return float(text)


@contextmanager
def _output(path: Optional[str]):
    if path:
        with open(path, "w", newline="") as fh:
            yield fh
    else:
        yield sys.stdout


def _common(p: argparse.ArgumentParser):
    p.add_argument("--lambda", dest="lam", type=float, help="first Lame parameter")
    p.add_argument("--mu", type=float, help="shear modulus")
    p.add_argument("--order", type=int, choices=(2, 4))
    p.add_argument("--ppw", type=float, help="grid points per wavelength")
    p.add_argument("--t-final", dest="t_final", type=float)
    p.add_argument("--periods", dest="n_periods", type=float)
    p.add_argument("--lx", type=float, help="depth of the computational domain")
    p.add_argument("--angle", dest="phi_angle", type=float, help="incidence angle (radians)")
    p.add_argument("--out", help="output CSV path (stdout when omitted)")
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--force", action="store_true", default=None, help="ignore the work budget")


_CONFIG_KEYS = ("lam", "mu", "order", "ppw", "t_final", "n_periods", "lx", "phi_angle", "out", "force")


def config_from_args(args, problem: str) -> ExperimentConfig:
    overrides = {k: getattr(args, k) for k in _CONFIG_KEYS if getattr(args, k, None) is not None}
    if args.config:
        cfg = load_config(args.config, overrides)
        if "problem" not in overrides:
            cfg = cfg.replace(problem=problem)
    else:
        cfg = ExperimentConfig(problem=problem).updated(overrides)
    return cfg.validate()


# -- handlers ------------------------------------------------------------------------------


def cmd_dispersion_table(args) -> int:
    ratios = args.lam_over_mu or [0.0, 1.0, 4.0, 8.0, math.inf]
    with _output(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(["lam_over_mu", "xi0_sq", "kappa10", "kappa20", "abs_phi_prime"])
        for row in dispersion_table(ratios):
            w.writerow([_fmt(x) for x in row])
    return EXIT_OK


def cmd_rayleigh_run(args) -> int:
    cfg = config_from_args(args, "rayleigh")
    check_budget(cfg)
    out = cfg.out
    series = run(cfg.replace(out=None))
    with _output(out) as fh:
        _write_series(fh, series)
    return EXIT_OK


def _write_series(fh, series):
    w = csv.writer(fh)
    w.writerow(["t", "max_err_u", "max_err_v", "energy"])
    for row in zip(series.t, series.err_u, series.err_v, series.energy):
        w.writerow([_fmt(x) for x in row])


def cmd_rayleigh_converge(args) -> int:
    cfg = config_from_args(args, "rayleigh")
    periods = [1.0] if cfg.n_periods is None else sorted({1.0, cfg.n_periods})
    res = convergence_study(cfg.replace(n_periods=None), args.refinements, periods)
    with _output(cfg.out) as fh:
        res.write_csv(fh)
    _report_partial(res)
    return EXIT_OK


def cmd_rayleigh_scale(args) -> int:
    order = args.order or 2
    pairs = []
    for text in args.pair or DEFAULT_PAIRS[order]:
        mu, p = text.split(",")
        pairs.append((float(mu), float(p)))
    res = scaling_study(order, pairs, n_periods=args.n_periods or 10.0, lam=args.lam or 1.0,
                        lx=args.lx or 5.0, force=bool(args.force))
    with _output(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(["label", "t_over_T", "err"])
        for r in res.rows:
            for a, b in zip(r.series.t_over_T, r.series.err):
                w.writerow([r.label, _fmt(a), _fmt(b)])
    if "max_curve_ratio" in res.metrics:
        print(f"max_curve_ratio = {res.metrics['max_curve_ratio']:.4g}", file=sys.stderr)
    _report_partial(res)
    return EXIT_OK


def cmd_modeconv_run(args) -> int:
    cfg = config_from_args(args, "modeconv")
    if args.order is None and not args.config:
        cfg = cfg.replace(order=4)
    check_budget(cfg)
    out = cfg.out
    series = run(cfg.replace(out=None))
    with _output(out) as fh:
        _write_series(fh, series)
    return EXIT_OK


def cmd_modeconv_study(args) -> int:
    lam = args.lam if args.lam is not None else 1.0
    mus = args.mus or [0.1, 0.01]
    res = modeconv_study([Material(lam, m) for m in mus], args.phi_angle or math.pi / 4,
                         args.ps or [10.0, 20.0], order=args.order or 4,
                         n_periods=args.n_periods or 2.0, force=bool(args.force))
    with _output(args.out) as fh:
        res.write_csv(fh)
    _report_partial(res)
    return EXIT_OK


def cmd_boundary_sweep(args) -> int:
    mat = Material(args.lam if args.lam is not None else 1.0, args.mu if args.mu is not None else 1.0)
    re_s = np.linspace(args.re_min, args.re_max, args.n)
    im_s = np.linspace(args.im_min, args.im_max, args.n)
    rows = boundary_sweep(mat, re_s, im_s, args.omega, args.g1, args.g2)
    with _output(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(["re_s", "im_s", "omega", "abs_u0", "abs_v0", "abs_phi"])
        for row in rows:
            w.writerow([_fmt(x) for x in row])
    return EXIT_OK


def cmd_predict(args) -> int:
    mat = Material(args.lam if args.lam is not None else 1.0, args.mu if args.mu is not None else 0.01)
    rep = predict_vs_measure(mat, args.order or 2, args.eps, lx=args.lx or 5.0, force=bool(args.force))
    with _output(args.out) as fh:
        w = csv.writer(fh)
        w.writerow(["lam", "mu", "order", "eps", "alpha0", "ppw", "predicted_eps", "model_eps",
                    "measured_eps", "phase", "ppw_at_eps", "wall_clock"])
        w.writerow([_fmt(mat.lam), _fmt(mat.mu), rep.order, _fmt(rep.eps), _fmt(rep.alpha0),
                    _fmt(rep.ppw), _fmt(rep.predicted_eps), _fmt(rep.model_eps),
                    _fmt(rep.measured_eps), _fmt(rep.phase), _fmt(rep.ppw_at_eps),
                    _fmt(rep.wall_clock)])
    return EXIT_OK


def cmd_exact_sample(args) -> int:
    mat = Material(args.lam if args.lam is not None else 1.0, args.mu if args.mu is not None else 0.01)
    x = np.linspace(0.0, args.x_max, args.nx)
    if args.kind == "rayleigh":
        spec = RayleighWaveSpec.create(mat)
        y = np.linspace(0.0, 1.0, args.ny)
        u, v = rayleigh_field(spec, x[:, None], y[None, :], args.t)
    else:
        spec = solve_reflection(mat, args.phi_angle if args.phi_angle is not None else math.pi / 4)
        y = np.linspace(0.0, spec.domain[1], args.ny)
        part = {"shear": "S", "incident": "in", "pressure": "P"}[args.kind]
        u, v = spec.wave(part, x[:, None], y[None, :], args.t)
    with _output(args.out) as fh:
        write_field_csv(fh, x, y, u, v)
    return EXIT_OK


def _report_partial(res):
    for note in res.notes:
        print(f"warning: {note}", file=sys.stderr)


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="halfplane", description="Elastic half-plane wave laboratory")
    sub = p.add_subparsers(dest="group", required=True)

    d = sub.add_parser("dispersion").add_subparsers(dest="action", required=True)
    t = d.add_parser("table", help="Rayleigh root data for several lam/mu")
    t.add_argument("--lam-over-mu", nargs="+", type=_ratio)
    t.add_argument("--out")
    t.set_defaults(func=cmd_dispersion_table)

    r = sub.add_parser("rayleigh").add_subparsers(dest="action", required=True)
    rr = r.add_parser("run", help="evolve the surface wave and record errors")
    _common(rr)
    rr.set_defaults(func=cmd_rayleigh_run)
    rc = r.add_parser("converge", help="grid refinement study")
    _common(rc)
    rc.add_argument("--refinements", type=int, default=3)
    rc.set_defaults(func=cmd_rayleigh_converge)
    rs = r.add_parser("scale", help="compare (mu, P) pairs on the scaling law")
    _common(rs)
    rs.add_argument("--pair", action="append", help="'mu,P'; repeat for each curve")
    rs.set_defaults(func=cmd_rayleigh_scale)

    m = sub.add_parser("modeconv").add_subparsers(dest="action", required=True)
    mr = m.add_parser("run", help="outgoing shear wave run")
    _common(mr)
    mr.set_defaults(func=cmd_modeconv_run)
    ms = m.add_parser("study", help="materials x shear resolutions")
    _common(ms)
    ms.add_argument("--mus", nargs="+", type=float)
    ms.add_argument("--ps", nargs="+", type=float)
    ms.set_defaults(func=cmd_modeconv_study)

    b = sub.add_parser("boundary").add_subparsers(dest="action", required=True)
    bs = b.add_parser("sweep", help="boundary traces over a rectangle of s")
    bs.add_argument("--lambda", dest="lam", type=float)
    bs.add_argument("--mu", type=float)
    bs.add_argument("--omega", type=float, default=1.0)
    bs.add_argument("--re-min", type=float, default=0.01)
    bs.add_argument("--re-max", type=float, default=1.0)
    bs.add_argument("--im-min", type=float, default=-2.0)
    bs.add_argument("--im-max", type=float, default=2.0)
    bs.add_argument("--n", type=int, default=11)
    bs.add_argument("--g1", type=complex, default=1.0)
    bs.add_argument("--g2", type=complex, default=0.0)
    bs.add_argument("--out")
    bs.set_defaults(func=cmd_boundary_sweep)

    pr = sub.add_parser("predict", help="predicted vs measured phase error")
    _common(pr)
    pr.add_argument("--eps", type=float, default=0.01)
    pr.set_defaults(func=cmd_predict)

    e = sub.add_parser("exact").add_subparsers(dest="action", required=True)
    es = e.add_parser("sample", help="exact field on a grid as x,y,u,v")
    es.add_argument("--kind", choices=("rayleigh", "shear", "incident", "pressure"), default="rayleigh")
    es.add_argument("--lambda", dest="lam", type=float)
    es.add_argument("--mu", type=float)
    es.add_argument("--angle", dest="phi_angle", type=float)
    es.add_argument("--t", type=float, default=0.0)
    es.add_argument("--nx", type=int, default=21)
    es.add_argument("--ny", type=int, default=21)
    es.add_argument("--x-max", type=float, default=2.0)
    es.add_argument("--out")
    es.set_defaults(func=cmd_exact_sample)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    try:
        return args.func(args)
    except NumericalInstability as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
