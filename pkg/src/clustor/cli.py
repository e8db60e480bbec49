"""Command-line front end.

    clustor run SPEC_FILE [--set key=value ...] [--out PATH] [--format csv|json] [--tol T]
    clustor figure N [--out PATH] [--format csv|json] [--tol T]

A spec file is INI text with three sections::

    [experiment]
    system = oscillator
    experiment = quantization_scan
    output = csv

    [parameters]
    a = 0.005

    [grid]
    from = -0.5
    to = 6.5
    n = 400

``--set`` takes ``section.key=value`` or a bare ``key=value``; bare keys
are looked up in [experiment], then [grid], then [parameters].  Exit codes:
0 on success, 1 for invalid input (the message names the key), 2 for a
numerical failure (the message names the error and its module).
"""

from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .barrier import BarrierConfig, barrier_action_grid, barrier_momentum, region1_activation, region3_activation
from .errors import ClustorError, NumericalError, ValidationError
from .figures import FREE_UNITS, OSC_UNITS, PARITY_CODE, build_figure
from .free import FreeConfig, free_activation, free_dynamics_grid, free_world_line
from .io import Dataset, dumps
from .oscillator import (
    OscConfig,
    full_cycle_action,
    newtonian_density,
    omega_ratio,
    osc_density,
    osc_dynamics_grid,
    osc_world_line,
    quantization_scan,
)
from .points import assign_mass_energy, auto_points, sweep

__all__ = ["ExperimentSpec", "parse_spec", "run_experiment", "main"]

SYSTEM_PARAMS = {
    "free": {"m", "E", "A", "B", "C", "D", "hbar", "t_star"},
    "barrier": {"m", "E", "V", "x1", "x2", "A", "B", "C", "D", "hbar", "V_over_E", "x1_lambda", "x2_lambda"},
    "oscillator": {"eta", "a", "B", "C", "D", "t_star"},
}
EXPERIMENTS = {
    "free": {"dynamics_grid", "activation", "snapshot", "sweep"},
    "barrier": {"dynamics_grid", "activation"},
    "oscillator": {"dynamics_grid", "density", "period_scan", "action_scan", "quantization_scan", "snapshot",
                   "sweep"},
}
EXPERIMENT_KEYS = {"system", "experiment", "output", "output_path"}
GRID_KEYS = {"from", "to", "n"}
SECTIONS = ("experiment", "grid", "parameters")


@dataclass
class ExperimentSpec:
    system: str
    experiment: str
    parameters: Dict[str, float] = field(default_factory=dict)
    grid: Optional[Tuple[float, float, int]] = None
    output: str = "csv"
    output_path: Optional[str] = None


def _number(key: str, text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ValidationError("%s: expected a number, got %r" % (key, text)) from None
    if not math.isfinite(v):
        raise ValidationError("%s: value must be finite, got %r" % (key, text))
    return v


def _apply_override(cp: configparser.ConfigParser, item: str) -> None:
    key, sep, value = item.partition("=")
    key, value = key.strip(), value.strip()
    if not sep or not key:
        raise ValidationError("--set expects key=value, got %r" % item)
    if "." in key:
        section, _, name = key.partition(".")
        if section not in SECTIONS:
            raise ValidationError("%s: unknown section %r" % (key, section))
    elif key in EXPERIMENT_KEYS:
        section, name = "experiment", key
    elif key in GRID_KEYS:
        section, name = "grid", key
    else:
        section, name = "parameters", key
    cp[section][name] = value


def parse_spec(text: str, overrides: Sequence[str] = ()) -> ExperimentSpec:
    """Parse INI text plus ``--set`` overrides into a validated spec."""
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep parameter names case-sensitive (E vs e)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ValidationError("spec file: %s" % exc) from None
    for s in cp.sections():
        if s not in SECTIONS:
            raise ValidationError("%s: unknown section" % s)
    for s in SECTIONS:
        if not cp.has_section(s):
            cp.add_section(s)
    for item in overrides:
        _apply_override(cp, item)

    exp = cp["experiment"]
    for k in exp:
        if k not in EXPERIMENT_KEYS:
            raise ValidationError("experiment.%s: unknown key" % k)
    system = exp.get("system")
    if system not in SYSTEM_PARAMS:
        raise ValidationError("experiment.system: expected one of %s, got %r" % (sorted(SYSTEM_PARAMS), system))
    experiment = exp.get("experiment")
    if experiment not in EXPERIMENTS[system]:
        raise ValidationError("experiment.experiment: %r is not available for %s (choose from %s)"
                              % (experiment, system, sorted(EXPERIMENTS[system])))
    output = exp.get("output", "csv")
    if output not in ("csv", "json"):
        raise ValidationError("experiment.output: expected csv or json, got %r" % output)

    params = {}
    for k, v in cp["parameters"].items():
        if k not in SYSTEM_PARAMS[system]:
            raise ValidationError("parameters.%s: unknown key for system %s" % (k, system))
        params[k] = _number("parameters." + k, v)

    grid = None
    g = cp["grid"]
    for k in g:
        if k not in GRID_KEYS:
            raise ValidationError("grid.%s: unknown key" % k)
    if len(g):
        missing = GRID_KEYS - set(g)
        if missing:
            raise ValidationError("grid.%s: missing" % sorted(missing)[0])
        lo, hi = _number("grid.from", g["from"]), _number("grid.to", g["to"])
        n = _number("grid.n", g["n"])
        if n != int(n) or n < 2:
            raise ValidationError("grid.n: expected an integer >= 2, got %r" % g["n"])
        if not hi > lo:
            raise ValidationError("grid.to: must exceed grid.from")
        grid = (lo, hi, int(n))
    spec = ExperimentSpec(system, experiment, params, grid, output, exp.get("output_path"))
    _build_config(spec)  # validate physical parameters before any computation
    if experiment in ("dynamics_grid", "density", "period_scan", "action_scan", "quantization_scan", "sweep") \
            and grid is None:
        raise ValidationError("grid: experiment %s needs [grid] from, to, n" % experiment)
    if experiment == "snapshot" and "t_star" not in params:
        raise ValidationError("parameters.t_star: required for snapshot")
    return spec


def _build_config(spec: ExperimentSpec):
    p = {k: v for k, v in spec.parameters.items() if k != "t_star"}
    try:
        if spec.system == "free":
            return FreeConfig(**p)
        if spec.system == "barrier":
            lam_keys = {"V_over_E", "x1_lambda", "x2_lambda"}
            if lam_keys & set(p):
                if not lam_keys <= set(p):
                    raise ValidationError("parameters.%s: give V_over_E, x1_lambda and x2_lambda together"
                                          % sorted(lam_keys - set(p))[0])
                for k in ("V", "x1", "x2"):
                    if k in p:
                        raise ValidationError("parameters.%s: conflicts with the wavelength form" % k)
                v, a, b = p.pop("V_over_E"), p.pop("x1_lambda"), p.pop("x2_lambda")
                return BarrierConfig.in_wavelengths(v, a, b, **p)
            return BarrierConfig(**p)
        if spec.system == "oscillator":
            if spec.experiment in ("period_scan", "action_scan", "quantization_scan"):
                p.setdefault("eta", 0.0)
                if spec.experiment == "quantization_scan" and set(p) - {"eta", "a"}:
                    raise ValidationError("parameters.%s: quantization scans vary only a"
                                          % sorted(set(p) - {"eta", "a"})[0])
                p["eta"] = max(p["eta"], 0.0)  # eta is scanned; keep the template valid
            elif "eta" not in p:
                raise ValidationError("parameters.eta: required")
            return OscConfig(**p)
    except ValidationError as exc:
        raise ValidationError("parameters: %s" % exc) from None
    raise ValidationError("experiment.system: %r" % spec.system)


def _grid(spec: ExperimentSpec) -> np.ndarray:
    lo, hi, n = spec.grid
    return np.linspace(lo, hi, n)


def _meta(spec: ExperimentSpec, tol: float) -> dict:
    meta = {"system": spec.system, "experiment": spec.experiment, "tool_version": __version__, "tol": tol}
    meta.update({"param." + k: v for k, v in sorted(spec.parameters.items())})
    if spec.grid:
        meta["grid"] = list(spec.grid)
    return meta


def _snapshot_columns(snaps):
    rows = [(s.t_star, p.x, 1.0 if p.sign_class == "positive" else -1.0, p.mass, p.energy)
            for s in snaps if s.valid for p in s.points]
    arr = np.array(rows, dtype=float).reshape(-1, 5)
    return dict(t_star=arr[:, 0], x=arr[:, 1], sign=arr[:, 2], mass=arr[:, 3], energy=arr[:, 4])


def run_experiment(spec: ExperimentSpec, tol: float = 1e-8) -> Dataset:
    """Compute the dataset described by ``spec``."""
    cfg = _build_config(spec)
    units = OSC_UNITS if spec.system == "oscillator" else FREE_UNITS
    ds = Dataset(name="%s-%s" % (spec.system, spec.experiment), units=dict(units), metadata=_meta(spec, tol))
    two_pi = 2.0 * math.pi
    e = spec.experiment
    if spec.system == "free":
        if e == "dynamics_grid":
            x = _grid(spec)
            W, p, t = free_dynamics_grid(cfg, x * (1.0 / cfg.k))
            ds.add("free", x=x, W=W / (two_pi * cfg.hbar), p=p / cfg.momentum_unit, t=t / cfg.time_unit)
        elif e == "activation":
            act = free_activation(cfg)
            ds.add("activation", **{k: np.array([v]) for k, v in act.as_dict().items()})
        elif e == "snapshot":
            snap = assign_mass_energy(auto_points(free_world_line(cfg), spec.parameters["t_star"] * cfg.time_unit,
                                                  half_width=cfg.wavelength / 2.0), cfg.m, cfg.E)
            cols = _snapshot_columns([snap])
            cols["x"] = cols["x"] * cfg.k
            cols["t_star"] = cols["t_star"] / cfg.time_unit
            ds.add("snapshot", **cols)
        elif e == "sweep":
            lo, hi, n = spec.grid
            snaps = sweep(free_world_line(cfg), lo * cfg.time_unit, hi * cfg.time_unit, n, m=cfg.m, E=cfg.E,
                          half_width=cfg.wavelength / 2.0)
            ds.add("counts", t_star=np.array([s.t_star for s in snaps]) / cfg.time_unit,
                   count=np.array([s.count if s.valid else np.nan for s in snaps], dtype=float))
    elif spec.system == "barrier":
        if e == "dynamics_grid":
            x = _grid(spec)
            xs = x / cfg.k
            ds.add("barrier", x=x, W=barrier_action_grid(cfg, xs) / (two_pi * cfg.hbar),
                   p=barrier_momentum(cfg, xs) / (cfg.hbar * cfg.k))
        elif e == "activation":
            for name, act in (("region1", region1_activation(cfg)), ("region3", region3_activation(cfg))):
                ds.add(name, **{k: np.array([v]) for k, v in act.as_dict().items()})
    else:
        if e == "dynamics_grid":
            x = _grid(spec)
            W, p, t = osc_dynamics_grid(cfg, x)
            ds.add("oscillator", x=x, W=W / two_pi, p=p, t=t / two_pi)
        elif e == "density":
            x = _grid(spec)
            res = osc_density(cfg, x)
            ds.add("oscillator", x=x, density=res.density)
            ds.add("newtonian", x=x, density=newtonian_density(cfg.eta, x))
            ds.metadata["tail_fraction"] = res.tail_fraction
        elif e in ("period_scan", "action_scan"):
            etas = _grid(spec)
            kw = {k: v for k, v in spec.parameters.items() if k not in ("eta", "t_star")}
            if e == "period_scan":
                vals = [omega_ratio(OscConfig(float(h), **kw), rtol=tol) for h in etas]
                ds.add("oscillator", eta=etas, omega_ratio=np.array(vals))
            else:
                vals = [0.0 if h <= -0.5 else full_cycle_action(OscConfig(float(h), **kw)) for h in etas]
                ds.add("oscillator", eta=etas, J=np.array(vals))
        elif e == "quantization_scan":
            lo, hi, n = spec.grid
            r = quantization_scan(spec.parameters.get("a", 1.0), lo, hi, n)
            ds.add("scan", eta=r.eta, J=r.J)
            ds.add("steps", eta=np.array([s.eta for s in r.steps]), size=np.array([s.size for s in r.steps]),
                   parity=np.array([PARITY_CODE[s.parity] for s in r.steps]))
            ds.units.update({"size": "h", "parity": "-1 zero-point, 0 even, 1 odd"})
        elif e in ("snapshot", "sweep"):
            wl = osc_world_line(cfg)
            kw = dict(half_width=cfg.turning_point + 2.0, max_half_width=24.0, samples_per_unit=100.0)
            if e == "snapshot":
                snap = assign_mass_energy(auto_points(wl, spec.parameters["t_star"] * two_pi, **kw),
                                          1.0, cfg.energy)
                cols = _snapshot_columns([snap])
                cols["t_star"] = cols["t_star"] / two_pi
                ds.add("snapshot", **cols)
            else:
                lo, hi, n = spec.grid
                snaps = sweep(wl, lo * two_pi, hi * two_pi, n, m=1.0, E=cfg.energy, **kw)
                ds.add("counts", t_star=np.array([s.t_star for s in snaps]) / two_pi,
                       count=np.array([s.count if s.valid else np.nan for s in snaps], dtype=float))
    return ds


def _emit(ds: Dataset, fmt: str, out: Optional[str]) -> None:
    text = dumps(ds, fmt)
    if out is None or out == "-":
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            sys.stdout = None  # reader went away; nothing left to report
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="clustor", description="Clustor datasets for the free, barrier and "
                                                             "oscillator systems.")
    ap.add_argument("--version", action="version", version="%(prog)s " + __version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output path (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--tol", type=float, default=1e-8, help="relative tolerance of limit evaluations")

    r = sub.add_parser("run", help="run an experiment from a spec file")
    r.add_argument("spec_file")
    r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a spec value")
    common(r)
    f = sub.add_parser("figure", help="emit the dataset of figure N (1-26)")
    f.add_argument("n")
    common(f)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if not (args.tol > 0 and math.isfinite(args.tol)):
            raise ValidationError("--tol: must be a positive number")
        if args.command == "figure":
            ds = build_figure(args.n, tol=args.tol)
            _emit(ds, args.format or "csv", args.out)
        else:
            try:
                with open(args.spec_file) as fh:
                    text = fh.read()
            except OSError as exc:
                raise ValidationError("spec_file: %s" % exc) from None
            spec = parse_spec(text, args.set)
            ds = run_experiment(spec, tol=args.tol)
            _emit(ds, args.format or spec.output, args.out if args.out else spec.output_path)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except NumericalError as exc:
        print("numerical failure: %s in %s: %s" % (type(exc).__name__, exc.module, exc), file=sys.stderr)
        return 2
    except ClustorError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
