"""Command-line front end: single-point evaluation, parameter sweeps,
Monte Carlo runs, optimal rate / time-split solvers, harvester curve
tabulation, and sigmoid fitting.  All tabular output is CSV with '#'
comment lines carrying the resolved configuration."""

import argparse
import importlib.resources
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import __version__, analysis, mcsim, scenario
from .channel import NakagamiLink, effective
from .ehmodel import (Linear, NonLinearSigmoid, PiecewiseLinear, fit_sigmoid,
                      harvested_power, load_tabulated)
from .numerics import ConvergenceError

_AXES = ("pt_dbm", "rate", "tau", "n1", "n2", "m1", "m2")
_INT_AXES = ("n1", "n2", "m1", "m2")
_METHODS = ("quadrature", "series", "asymptotic", "montecarlo", "upper_bound")


@dataclass(frozen=True)
class SweepSpec:
    axis: str
    start: float
    stop: float
    points: int
    scale: str = "linear"
    methods: tuple = ("quadrature", "asymptotic")

    def __post_init__(self):
        if self.axis not in _AXES:
            raise ValueError(f"axis must be one of {_AXES}")
        if not self.start < self.stop:
            raise ValueError("start must be below stop")
        if self.points < 2:
            raise ValueError("points must be >= 2")
        if self.scale not in ("linear", "log"):
            raise ValueError("scale must be linear or log")
        bad = [m for m in self.methods if m not in _METHODS]
        if bad:
            raise ValueError(f"unknown methods {bad}; choose from {_METHODS}")

    def grid(self):
        if self.scale == "log":
            if self.start <= 0:
                raise ValueError("log scale requires positive start")
            vals = np.geomspace(self.start, self.stop, self.points)
        else:
            vals = np.linspace(self.start, self.stop, self.points)
        if self.axis in _INT_AXES:
            ints = np.round(vals)
            if not np.allclose(vals, ints, atol=1e-9):
                raise ValueError(f"axis {self.axis} needs an integer grid")
            return [int(v) for v in ints]
        return [float(v) for v in vals]


def _default_settings():
    lb, eh, theta, sigma2 = scenario.table1_defaults()
    return {
        "pt": scenario.dbm_to_watts(27.0), "tau": 0.5, "rate": 5.0,
        "sigma2": sigma2, "theta": theta,
        "m1": 2, "m2": 2, "n1": 1, "n2": 1,
        "d1": lb.d1_m, "d2": lb.d2_m, "freq": lb.freq_hz,
        "exponent": lb.exponent, "gain_ps": lb.gain_ps_dbi,
        "gain_irs": lb.gain_irs_dbi, "gain_wd": lb.gain_wd_dbi,
        "a": eh.a, "b": eh.b, "M": eh.m_sat,
        "eh": "sigmoid", "eta": 0.5,
    }


def _resolve_settings(args):
    settings = _default_settings()
    if getattr(args, "scenario", None):
        settings.update(scenario.parse_scenario_file(args.scenario))
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ValueError(f"--set expects key=value, got '{item}'")
        key, _, value = item.partition("=")
        k, v = scenario.parse_setting(key, value)
        settings[k] = v
    return settings


def _link_budget(s):
    return scenario.LinkBudget(
        freq_hz=s["freq"], d1_m=s["d1"], d2_m=s["d2"], exponent=s["exponent"],
        gain_ps_dbi=s["gain_ps"], gain_irs_dbi=s["gain_irs"],
        gain_wd_dbi=s["gain_wd"])


def _eh_model(s):
    kind = s.get("eh", "sigmoid")
    if kind == "sigmoid":
        return NonLinearSigmoid(m_sat=s["M"], a=s["a"], b=s["b"])
    if kind == "linear":
        return Linear(eta=s["eta"])
    if kind == "piecewise":
        return PiecewiseLinear(eta=s["eta"], m_sat=s["M"])
    if kind == "tabulated":
        return load_tabulated(s["table"]) if "table" in s else _packaged_table()
    raise ValueError(f"unknown eh model '{kind}'")


def _packaged_table():
    ref = importlib.resources.files("wpclink").joinpath("data/eh_circuit_1mohm.csv")
    with importlib.resources.as_file(ref) as path:
        return load_tabulated(path)


def _system_params(s):
    lb = _link_budget(s)
    mu1 = s.get("mu1", scenario.mean_gain(lb, "downlink"))
    mu2 = s.get("mu2", scenario.mean_gain(lb, "uplink"))
    return analysis.SystemParams(
        p_t=s["pt"], tau=s["tau"], rate=s["rate"], sigma2=s["sigma2"],
        theta=s["theta"],
        dl=effective(NakagamiLink(s["m1"], s["n1"], mu1)),
        ul=effective(NakagamiLink(s["m2"], s["n2"], mu2)),
        eh=_eh_model(s)), mu1, mu2


def _header_lines(command, settings, extra=None):
    lines = [f"# wpclink {__version__}", f"# command: {command}"]
    for key in sorted(settings):
        lines.append(f"# {key} = {_fmt(settings[key])}")
    for key, val in (extra or {}).items():
        lines.append(f"# {key} = {_fmt(val)}")
    return lines

def _fmt(v):
    if isinstance(v, float):
        return f"{v:.9e}"
    return str(v)


def _write_output(dest, lines):
    text = "\n".join(lines) + "\n"
    if dest:
        with open(dest, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _point_params(base, mu1, mu2, settings, axis, value):
    if axis == "pt_dbm":
        return replace(base, p_t=scenario.dbm_to_watts(value))
    if axis == "rate":
        return replace(base, rate=value)
    if axis == "tau":
        return replace(base, tau=value)
    if axis == "n1":
        return replace(base, dl=effective(NakagamiLink(settings["m1"], value, mu1)))
    if axis == "m1":
        return replace(base, dl=effective(NakagamiLink(value, settings["n1"], mu1)))
    if axis == "n2":
        return replace(base, ul=effective(NakagamiLink(settings["m2"], value, mu2)))
    if axis == "m2":
        return replace(base, ul=effective(NakagamiLink(value, settings["n2"], mu2)))
    raise ValueError(axis)


def _outage_by_method(p, method, mc_cfg, workers):
    if method == "quadrature":
        return analysis.outage_quadrature(p).value
    if method == "series":
        return analysis.outage_series_or_quadrature(p).value
    if method == "asymptotic":
        return analysis.outage_asymptotic(p).value
    if method == "montecarlo":
        return mcsim.simulate(p, mc_cfg, workers=workers).outage
    if method == "upper_bound":
        return 0.0
    raise ValueError(method)


def _cell(p, method, quantity, mc_cfg, workers):
    outage = _outage_by_method(p, method, mc_cfg, workers)
    if quantity == "outage":
        return outage
    return p.rate * (1.0 - p.tau) * (1.0 - outage)


def cmd_eval(args):
    settings = _resolve_settings(args)
    p, _, _ = _system_params(settings)
    methods = args.methods.split(",")
    mc_cfg = mcsim.SimConfig(args.samples, args.seed, args.batch)
    lines = _header_lines("eval", settings)
    cols, vals = [], []
    for m in methods:
        outage = _outage_by_method(p, m, mc_cfg, args.workers)
        cols += [f"outage_{m}", f"throughput_{m}"]
        vals += [outage, p.rate * (1.0 - p.tau) * (1.0 - outage)]
    lines.append(",".join(cols))
    lines.append(",".join(f"{v:.8e}" for v in vals))
    _write_output(args.out, lines)
    return 0


def cmd_sweep(args):
    settings = _resolve_settings(args)
    base, mu1, mu2 = _system_params(settings)
    spec = SweepSpec(axis=args.axis, start=args.start, stop=args.stop,
                     points=args.points, scale=args.scale,
                     methods=tuple(args.methods.split(",")))
    quantity = args.quantity or ("throughput" if spec.axis in ("rate", "tau")
                                 else "outage")
    grid = spec.grid()
    mc_cfg0 = mcsim.SimConfig(args.samples, args.seed, args.batch)

    def one_point(idx_value):
        idx, value = idx_value
        p = _point_params(base, mu1, mu2, settings, spec.axis, value)
        cfg = replace(mc_cfg0, seed=args.seed + idx)
        return [_cell(p, m, quantity, cfg, 1) for m in spec.methods]

    lines = _header_lines("sweep", settings, {
        "axis": spec.axis, "scale": spec.scale, "quantity": quantity,
        "points": spec.points, "seed": args.seed, "samples": args.samples})
    lines.append(",".join([spec.axis] + [f"{quantity}_{m}" for m in spec.methods]))
    rows = []
    try:
        if args.workers > 1:
            with ThreadPoolExecutor(max_workers=args.workers) as pool:
                results = list(pool.map(one_point, enumerate(grid)))
        else:
            results = [one_point(iv) for iv in enumerate(grid)]
        for value, cells in zip(grid, results):
            axis_txt = str(value) if spec.axis in _INT_AXES else f"{value:.8e}"
            rows.append(",".join([axis_txt] + [f"{v:.8e}" for v in cells]))
    except ConvergenceError as exc:
        lines.extend(rows)
        lines.append(f"# FAILED: {exc}")
        _write_output(args.out, lines)
        return 2
    lines.extend(rows)
    _write_output(args.out, lines)
    return 0


def cmd_mc(args):
    settings = _resolve_settings(args)
    p, _, _ = _system_params(settings)
    cfg = mcsim.SimConfig(args.samples, args.seed, args.batch)
    res = mcsim.simulate(p, cfg, workers=args.workers)
    lines = _header_lines("mc", settings, {
        "seed": cfg.seed, "samples": cfg.n_samples, "batch": cfg.batch})
    lines.append("outage,ci95_halfwidth,mean_harvested_w,mean_snr_db,throughput")
    lines.append(",".join(f"{v:.8e}" for v in (
        res.outage, res.ci95_halfwidth, res.mean_harvested,
        res.mean_snr_db, res.throughput)))
    _write_output(args.out, lines)
    return 0


def cmd_opt_rate(args):
    settings = _resolve_settings(args)
    p, _, _ = _system_params(settings)
    r_star, th_star = analysis.optimal_rate_asymptotic(p)
    r_search, th_search = analysis.crosscheck_rate_by_search(p)
    print(f"r_opt = {r_star:.10g}")
    print(f"th_opt = {th_star:.10g}")
    print(f"r_search = {r_search:.10g}")
    print(f"th_search = {th_search:.10g}")
    return 0


def cmd_opt_tau(args):
    settings = _resolve_settings(args)
    p, _, _ = _system_params(settings)
    t_star, th_star = analysis.optimal_tau_asymptotic(p)
    t_search, th_search = analysis.crosscheck_tau_by_search(p)
    print(f"tau_opt = {t_star:.10g}")
    print(f"th_opt = {th_star:.10g}")
    print(f"tau_search = {t_search:.10g}")
    print(f"th_search = {th_search:.10g}")
    return 0


def cmd_eh_curve(args):
    settings = _resolve_settings(args)
    models = {}
    for name in args.models.split(","):
        s = dict(settings, eh=name)
        models[name] = _eh_model(s)
    if args.scale == "log":
        grid = np.geomspace(max(args.pin_start, 1e-12), args.pin_stop, args.points)
    else:
        grid = np.linspace(args.pin_start, args.pin_stop, args.points)
    lines = _header_lines("eh-curve", settings, {
        "pin_start_uw": args.pin_start, "pin_stop_uw": args.pin_stop})
    lines.append(",".join(["p_in_uw"] + [f"p_out_uw_{m}" for m in models]))
    for p_uw in grid:
        outs = [harvested_power(mod, p_uw * 1e-6) * 1e6 for mod in models.values()]
        lines.append(",".join([f"{p_uw:.8e}"] + [f"{v:.8e}" for v in outs]))
    _write_output(args.out, lines)
    return 0


def cmd_fit(args):
    pairs = []
    table = load_tabulated(args.data)
    pairs = list(zip(table.p_in, table.p_out))
    report = fit_sigmoid(pairs)
    lines = [f"# wpclink {__version__}", "# command: fit",
             f"# data = {args.data}",
             f"m_sat_w = {report.params.m_sat:.10g}",
             f"a_per_w = {report.params.a:.10g}",
             f"b_w = {report.params.b:.10g}",
             f"rmse_w = {report.rmse:.10g}",
             f"iterations = {report.iterations}",
             f"converged = {report.converged}"]
    _write_output(args.out, lines)
    return 0


def _add_common(sub):
    sub.add_argument("--scenario", help="scenario file (key = value lines)")
    sub.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one scenario setting (repeatable)")
    sub.add_argument("--out", help="output file (default stdout)")
    sub.add_argument("--workers", type=int,
                     default=int(os.environ.get("WPCLINK_WORKERS", "1")))


def _add_mc_opts(sub, samples):
    sub.add_argument("--samples", type=int, default=samples)
    sub.add_argument("--seed", type=int, default=1)
    sub.add_argument("--batch", type=int, default=1_000_000)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wpclink",
        description="Outage and throughput analysis for a wireless-powered "
                    "link with a saturating RF harvester")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("eval", help="all requested methods at one operating point")
    _add_common(s)
    s.add_argument("--methods", default="quadrature,series,asymptotic")
    _add_mc_opts(s, 1_000_000)
    s.set_defaults(func=cmd_eval)

    s = subs.add_parser("sweep", help="CSV sweep along one axis")
    _add_common(s)
    s.add_argument("--axis", required=True, choices=_AXES)
    s.add_argument("--start", type=float, required=True)
    s.add_argument("--stop", type=float, required=True)
    s.add_argument("--points", type=int, required=True)
    s.add_argument("--scale", default="linear", choices=("linear", "log"))
    s.add_argument("--methods", default="quadrature,asymptotic")
    s.add_argument("--quantity", choices=("outage", "throughput"),
                   help="default: throughput for rate/tau axes, else outage")
    _add_mc_opts(s, 1_000_000)
    s.set_defaults(func=cmd_sweep)

    s = subs.add_parser("mc", help="Monte Carlo at one operating point")
    _add_common(s)
    _add_mc_opts(s, 10_000_000)
    s.set_defaults(func=cmd_mc)

    s = subs.add_parser("opt-rate", help="throughput-optimal rate (high power)")
    _add_common(s)
    s.set_defaults(func=cmd_opt_rate)

    s = subs.add_parser("opt-tau", help="throughput-optimal time split (high power)")
    _add_common(s)
    s.set_defaults(func=cmd_opt_tau)

    s = subs.add_parser("eh-curve", help="tabulate harvester transfer functions")
    _add_common(s)
    s.add_argument("--models", default="sigmoid,linear,piecewise,tabulated")
    s.add_argument("--pin-start", type=float, default=0.0, help="microwatts")
    s.add_argument("--pin-stop", type=float, default=20.0, help="microwatts")
    s.add_argument("--points", type=int, default=41)
    s.add_argument("--scale", default="linear", choices=("linear", "log"))
    s.set_defaults(func=cmd_eh_curve)

    s = subs.add_parser("fit", help="fit the sigmoid model to measured data")
    s.add_argument("--data", required=True, help="two-column uW data file")
    s.add_argument("--out")
    s.set_defaults(func=cmd_fit)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, analysis.ModelMismatchError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
