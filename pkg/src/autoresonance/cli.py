"""Command-line front end.

    autoresonance simulate  --f 12.1 --t-end 30 -o run.csv
    autoresonance threshold --mu1 0 --mu2 0 --f-lo 10 --f-hi 14 --tol 0.05
    autoresonance arrest    --f 18 --mu 0.005 --delta1 1 --delta2 1
    autoresonance compare   --f 18 --mu 0.005 --delta1 1 --delta2 1 -o cmp.csv

``--config FILE`` reads ``key = value`` lines (keys are flag names without
the leading dashes) and uses them as defaults; explicit flags still win.
"""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys

import numpy as np

from . import analysis
from . import asymptotics as asy
from .integrator import DEFAULT_DT, IntegrationConfig
from .model import DissipationDecomposition, ModelParams, PhysicalParams
from .reduction import validate_reduction

ENVELOPE_COLUMNS = ["t", "re_A", "im_A", "abs_A", "re_B", "im_B", "abs_B"]


class ConfigError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    return format(float(v), ".17g") if math.isfinite(v) else str(float(v))


def _write_csv(path, header, rows):
    if path is None:
        return
    fh = sys.stdout if path == "-" else open(path, "w", newline="")
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    finally:
        if fh is not sys.stdout:
            fh.close()


def _envelope_row(t, A, B):
    return [t, A.real, A.imag, abs(A), B.real, B.imag, abs(B)]


def read_config(path) -> dict:
    out = {}
    with open(path) as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{n}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.lstrip("-").replace("-", "_")] = value
    return out


# --- parameter helpers -----------------------------------------------------

def _add_model_args(p, f_required=True):
    p.add_argument("--f", type=float, required=f_required, help="reduced forcing amplitude")
    p.add_argument("--mu1", type=float, help="dissipation of the first mode")
    p.add_argument("--mu2", type=float, help="dissipation of the second mode")
    p.add_argument("--mu", type=float, help="common dissipation scale")
    p.add_argument("--delta1", type=float, default=1.0)
    p.add_argument("--delta2", type=float, default=1.0)


def _add_time_args(p, t_end=analysis.DEFAULT_T_END, stride=100):
    p.add_argument("--t-start", type=float, default=analysis.DEFAULT_T_START)
    p.add_argument("--t-end", type=float, default=t_end)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--stride", type=int, default=stride, help="record every k-th step")


def _model(args, parser) -> tuple[ModelParams, DissipationDecomposition | None]:
    if args.mu is not None:
        if args.mu1 is not None or args.mu2 is not None:
            parser.error("give either --mu (with --delta1/--delta2) or --mu1/--mu2")
        p = ModelParams.from_decomposition(args.f, args.mu, args.delta1, args.delta2)
        d = DissipationDecomposition(args.mu, args.delta1, args.delta2) if args.mu > 0 else None
        return p, d
    p = ModelParams(args.f, args.mu1 or 0.0, args.mu2 or 0.0)
    d = DissipationDecomposition.from_params(p) if (p.mu1 or p.mu2) else None
    return p, d


def _need_decomposition(d, parser):
    if d is None:
        parser.error("this command needs dissipation: --mu > 0 with --delta1/--delta2")
    return d


def _floats(text) -> list[float]:
    return [float(v) for v in str(text).replace(",", " ").split()]


# --- commands --------------------------------------------------------------

def cmd_simulate(args, parser):
    p, _ = _model(args, parser)
    cfg = IntegrationConfig(args.t_start, args.t_end, dt=args.dt, record_stride=args.stride)
    traj = analysis.simulate(p, cfg)
    _write_csv(args.output, ENVELOPE_COLUMNS,
               (_envelope_row(t, s[0], s[1]) for t, s in zip(traj.times, traj.states)))
    if traj.terminated_early:
        print(f"terminated early: {traj.reason}", file=sys.stderr)
        return 1
    rep = analysis.classify_capture(traj) if traj.final_time >= 10 else None
    summary = f"f={p.f:g} mu1={p.mu1:g} mu2={p.mu2:g} t_end={traj.final_time:g} " \
              f"|A(t_end)|={abs(traj.final_state[0]):.6g}"
    if rep is not None:
        summary += f" growth_ratio={rep.growth_ratio:.4f} captured={rep.captured}"
        if rep.arrest_time is not None:
            summary += f" peak|A|={rep.peak_amp:.6g} at t={rep.arrest_time:.6g}"
    print(summary)
    return 0


def cmd_asymptotic(args, parser):
    p, d = _model(args, parser)
    d = _need_decomposition(d, parser)
    if args.inner:
        sig = np.linspace(args.sigma_min, args.sigma_max, args.n)
        rows = []
        for s in sig:
            ev = asy.inner_eval(float(s), p, d, b1=args.b1)
            rows.append([s, ev.a.real, ev.a.imag, ev.b.real, ev.b.imag, ev.psi0_inner, ev.valid])
        _write_csv(args.output, ["sigma", "re_a", "im_a", "re_b", "im_b", "psi0", "valid"], rows)
        print(f"inner: b0={ev.b0:.10g} a0={ev.a0:.10g} psi00={ev.psi00:.10g} "
              f"phase_coeff={asy.inner_phase_coefficient(p, d):.10g}")
        return 0
    theta_star = asy.outer_breakdown_theta(p, d) if p.f >= 12 and d.rate > 0 else math.inf
    hi = args.theta_max if args.theta_max is not None else 0.999 * theta_star
    if not math.isfinite(hi):
        parser.error("--theta-max is required when there is no breakdown point")
    rows = []
    for th in np.linspace(args.theta_min, hi, args.n):
        ev = asy.outer_eval(float(th), p, d)
        A, B = ev.a / d.mu, ev.b / d.mu
        rows.append([th, th / d.mu, A.real, A.imag, abs(A), B.real, B.imag, abs(B),
                     ev.psi0, ev.psi0_prime, ev.alpha2_corr, ev.beta2_corr, ev.S / d.mu, ev.valid])
    _write_csv(args.output, ["theta", "t", "re_A", "im_A", "abs_A", "re_B", "im_B", "abs_B",
                             "psi0", "psi0_prime", "alpha2", "beta2", "S_over_mu", "valid"], rows)
    print(f"theta*={theta_star:.10g} t*={theta_star / d.mu:.10g} "
          f"peak|A|~{8 * theta_star / d.mu:.10g}")
    return 0


def cmd_compare(args, parser):
    p, d = _model(args, parser)
    d = _need_decomposition(d, parser)
    lo, hi = args.theta_min, args.theta_max
    if hi is None:
        hi = 0.99 * asy.outer_breakdown_theta(p, d)
    cfg = IntegrationConfig(args.t_start, hi / d.mu, dt=args.dt, record_stride=args.stride)
    ec = analysis.error_curve(p, d, (lo, hi), cfg, init=args.init)
    header = ENVELOPE_COLUMNS + ["theta", "abs_a_asym", "rel_err_a", "abs_b_asym", "rel_err_b"]
    rows = (_envelope_row(t, A, B) + [th, abs(Aa), ea, abs(Ba), eb]
            for t, A, B, th, Aa, ea, Ba, eb in zip(ec.times, ec.A_num, ec.B_num, ec.thetas,
                                                   ec.A_asym, ec.rel_err_a, ec.B_asym,
                                                   ec.rel_err_b))
    _write_csv(args.output, header, rows)
    print(f"theta in [{lo:g}, {hi:g}] init={args.init}: max rel_err_a={ec.rel_err_a.max():.4g} "
          f"max rel_err_b={ec.rel_err_b.max():.4g}")
    return 0


def cmd_threshold(args, parser):
    res = analysis.find_threshold(args.mu1, args.mu2, args.f_lo, args.f_hi, args.tol,
                                  t_end=args.t_end, dt=args.dt, t_start=args.t_start)
    _write_csv(args.output, ["f", "growth_ratio", "captured"], res.history)
    print(f"f*={res.f_star:.6f} bracket=[{res.f_lo:.6f}, {res.f_hi:.6f}] "
          f"T={res.t_end:g} dt={res.dt:g} t_start={res.t_start:g}")
    return 0


def cmd_arrest(args, parser):
    p, d = _model(args, parser)
    d = _need_decomposition(d, parser)
    cfg = None
    if args.t_end is not None:
        cfg = IntegrationConfig(args.t_start, args.t_end, dt=args.dt, record_stride=args.stride)
    rep = analysis.arrest_prediction_check(p, d, cfg)
    _write_csv(args.output, ["t_numeric", "t_predicted", "rel_dev", "peak_numeric",
                             "peak_predicted", "peak_rel_dev"],
               [[rep.t_numeric, rep.t_predicted, rep.rel_dev, rep.peak_numeric,
                 rep.peak_predicted, rep.peak_rel_dev]])
    print(f"arrest t_numeric={rep.t_numeric:.6g} t_predicted={rep.t_predicted:.6g} "
          f"rel_dev={rep.rel_dev:.4f} peak_numeric={rep.peak_numeric:.6g} "
          f"peak_predicted={rep.peak_predicted:.6g} peak_rel_dev={rep.peak_rel_dev:.4f}")
    return 0


def cmd_sweep(args, parser):
    fs = _floats(args.f_values)
    mus = _floats(args.mu_values)
    grid = [ModelParams.from_decomposition(f, mu, args.delta1, args.delta2)
            for f in fs for mu in mus]
    rows = analysis.sweep(grid, task=args.task, parallelism=args.jobs,
                          t_end=args.t_end, dt=args.dt, t_start=args.t_start)
    if args.task == "classify":
        header = ["f", "mu1", "mu2", "captured", "growth_ratio", "final_amp", "error"]
        out = [[r.params.f, r.params.mu1, r.params.mu2,
                *( [r.result.captured, r.result.growth_ratio, r.result.final_amp]
                   if r.result else [None, None, None]), r.error] for r in rows]
    else:
        header = ["f", "mu1", "mu2", "t_numeric", "t_predicted", "rel_dev",
                  "peak_numeric", "peak_predicted", "error"]
        out = [[r.params.f, r.params.mu1, r.params.mu2,
                *([r.result.t_numeric, r.result.t_predicted, r.result.rel_dev,
                   r.result.peak_numeric, r.result.peak_predicted]
                  if r.result else [None] * 5), r.error] for r in rows]
    _write_csv(args.output, header, out)
    failed = sum(r.error is not None for r in rows)
    print(f"sweep task={args.task} points={len(rows)} failed={failed}")
    return 0


def cmd_validate_reduction(args, parser):
    p = PhysicalParams(eps=args.eps, omega=args.omega, alpha1=args.alpha1,
                       alpha2=args.alpha2, nu1=args.nu1, nu2=args.nu2,
                       gamma=args.gamma, alpha=args.alpha)
    rep = validate_reduction(p, tau_end=args.tau_end)
    header = ["t", "re_A_fast", "im_A_fast", "re_A_ref", "im_A_ref",
              "re_B_fast", "im_B_fast", "re_B_ref", "im_B_ref"]
    _write_csv(args.output, header,
               ([t, a.real, a.imag, ar.real, ar.imag, b.real, b.imag, br.real, br.imag]
                for t, a, ar, b, br in zip(rep.times, rep.A_fast, rep.A_ref,
                                           rep.B_fast, rep.B_ref)))
    print(f"eps={p.eps:g} rel_err_A={rep.rel_err_A:.4g} rel_err_B={rep.rel_err_B:.4g}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autoresonance", description=__doc__.split("\n")[0])
    parser.add_argument("--config", help="key=value file with default flag values")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help)
        sp.set_defaults(func=func)
        sp.add_argument("-o", "--output", help="CSV output path ('-' for stdout)")
        return sp

    sp = add("simulate", cmd_simulate, "integrate the main-resonance equations from rest")
    _add_model_args(sp)
    _add_time_args(sp)

    sp = add("asymptotic", cmd_asymptotic, "tabulate the outer (or inner) asymptotics")
    _add_model_args(sp)
    sp.add_argument("--theta-min", type=float, default=0.0)
    sp.add_argument("--theta-max", type=float)
    sp.add_argument("--n", type=int, default=201)
    sp.add_argument("--inner", action="store_true", help="tabulate the inner solution")
    sp.add_argument("--sigma-min", type=float, default=0.0)
    sp.add_argument("--sigma-max", type=float, default=10.0)
    sp.add_argument("--b1", type=float, default=0.0)

    sp = add("compare", cmd_compare, "relative error of the outer asymptotics vs RK4")
    _add_model_args(sp)
    _add_time_args(sp)
    sp.add_argument("--theta-min", type=float, default=0.1)
    sp.add_argument("--theta-max", type=float)
    sp.add_argument("--init", choices=["outer", "rest"], default="outer")

    sp = add("threshold", cmd_threshold, "bisect the capture threshold in f")
    sp.add_argument("--mu1", type=float, default=0.0)
    sp.add_argument("--mu2", type=float, default=0.0)
    sp.add_argument("--f-lo", type=float, default=10.0)
    sp.add_argument("--f-hi", type=float, default=14.0)
    sp.add_argument("--tol", type=float, default=0.05)
    _add_time_args(sp)

    sp = add("arrest", cmd_arrest, "numeric vs predicted arrest of growth")
    _add_model_args(sp)
    _add_time_args(sp, t_end=None, stride=10)

    sp = add("sweep", cmd_sweep, "classify or arrest over an (f, mu) grid")
    sp.add_argument("--f-values", required=True, help="comma/space separated f values")
    sp.add_argument("--mu-values", default="0", help="comma/space separated mu values")
    sp.add_argument("--delta1", type=float, default=1.0)
    sp.add_argument("--delta2", type=float, default=1.0)
    sp.add_argument("--task", choices=["classify", "arrest"], default="classify")
    sp.add_argument("--jobs", type=int, default=1)
    _add_time_args(sp)

    sp = add("validate-reduction", cmd_validate_reduction,
             "fast oscillator system vs envelope equations")
    sp.add_argument("--eps", type=float, default=1e-3)
    sp.add_argument("--omega", type=float, default=1.0)
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--alpha1", type=float, default=1.0)
    sp.add_argument("--alpha2", type=float, default=1.0)
    sp.add_argument("--nu1", type=float, default=0.0)
    sp.add_argument("--nu2", type=float, default=0.0)
    sp.add_argument("--gamma", type=float, default=24.2)
    sp.add_argument("--tau-end", type=float, default=1.0)
    return parser


def _apply_config(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    try:
        values = read_config(known.config)
    except (OSError, ConfigError) as exc:
        parser.error(f"config: {exc}")
    subparsers = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in subparsers.choices.values():
        dests = {a.dest: a for a in sp._actions}
        defaults = {}
        for key, raw in values.items():
            action = dests.get(key)
            if action is None:
                continue
            if action.type is not None:
                try:
                    defaults[key] = action.type(raw)
                except ValueError:
                    parser.error(f"config: bad value for {key}: {raw!r}")
            elif isinstance(action, argparse._StoreTrueAction):
                defaults[key] = raw.lower() in ("1", "true", "yes", "on")
            else:
                defaults[key] = raw
            # a config value satisfies a required flag
            action.required = False
        sp.set_defaults(**defaults)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    _apply_config(parser, argv)
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, parser)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
