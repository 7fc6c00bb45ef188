"""Command-line front end: density scans, bound states and pole traces as CSV or JSON."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from . import pcf, poles, starkfield, zerofield
from .model import ModelParams

# key -> (type, default); every key is also a long flag with '_' spelled '-'
OPTIONS = {
    "g": (float, 3.0),
    "R": (float, 1.0),
    "F": (float, 0.2),
    "m": (float, 1.0),
    "c": (float, 1.0),
    "emin": (float, -8.0),
    "emax": (float, 8.0),
    "n": (int, 4001),
    "rmin": (float, 0.5),
    "rmax": (float, 5.0),
    "rstep": (float, 0.01),
    "format": (str, "csv"),
    "out": (str, None),
    "threads": (int, None),
    "d_avoid": (float, 0.05),
    "d_cross": (float, 0.02),
    "window": (int, 5),
    "seed_re_min": (float, poles.CONTINUUM_WINDOW[0][0]),
    "seed_re_max": (float, poles.CONTINUUM_WINDOW[0][1]),
    "seed_im_min": (float, poles.CONTINUUM_WINDOW[1][0]),
}
# keys echoed in each subcommand's header
USED = {
    "free-density": ["m", "c", "emin", "emax", "n"],
    "zero-field": ["g", "R", "m", "c", "emin", "emax", "n"],
    "stark-density": ["g", "R", "F", "m", "c", "emin", "emax", "n"],
    "poles": ["g", "F", "m", "c", "rmin", "rmax", "rstep", "d_avoid", "d_cross", "window",
              "seed_re_min", "seed_re_max", "seed_im_min"],
}


class UsageError(Exception):
    pass


class NumericalFailure(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    params: ModelParams
    emin: float
    emax: float
    n: int
    rmin: float
    rmax: float
    rstep: float
    out: Optional[str]
    format: str
    threads: int
    tolerances: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)

    def grid(self):
        """n equally spaced energies from emin to emax inclusive."""
        span = self.emax - self.emin
        return [self.emin + span * i / (self.n - 1) for i in range(self.n)]

    def echo(self):
        return {k: self.values[k] for k in USED[self.subcommand]}


def fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return format(x, ".17g")
    return str(x)


def read_config_file(path):
    vals = {}
    try:
        with open(path) as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}")
    for no, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{no}: expected key=value")
        key, val = (t.strip() for t in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in OPTIONS:
            raise UsageError(f"{path}:{no}: unknown key {key!r}")
        vals[key] = val
    return vals


def _convert(key, raw):
    typ = OPTIONS[key][0]
    try:
        return typ(raw)
    except (TypeError, ValueError):
        raise UsageError(f"bad value for {key}: {raw!r}")


def build_config(ns) -> RunConfig:
    """Flags beat the config file, which beats the built-in defaults."""
    filed = read_config_file(ns.config) if ns.config else {}
    vals = {}
    for key, (typ, default) in OPTIONS.items():
        flag = getattr(ns, key, None)
        if flag is not None:
            vals[key] = flag
        elif key in filed:
            vals[key] = _convert(key, filed[key])
        else:
            vals[key] = default
    if vals["threads"] is None:
        vals["threads"] = os.cpu_count() or 1
    if vals["format"] not in ("csv", "json"):
        raise UsageError("format must be csv or json")
    if vals["n"] < 2:
        raise UsageError("grid count must be at least 2")
    if not vals["emin"] < vals["emax"]:
        raise UsageError("emin must be below emax")
    if not vals["rstep"] > 0:
        raise UsageError("rstep must be positive")
    if not vals["rmin"] <= vals["rmax"]:
        raise UsageError("rmin must not exceed rmax")
    if vals["threads"] < 1:
        raise UsageError("threads must be at least 1")
    try:
        params = ModelParams(m=vals["m"], c=vals["c"], g=vals["g"], R=vals["R"], F=vals["F"])
    except ValueError as exc:
        raise UsageError(str(exc))
    tol = {"d_avoid": vals["d_avoid"], "d_cross": vals["d_cross"], "window": vals["window"]}
    return RunConfig(ns.command, params, vals["emin"], vals["emax"], vals["n"],
                     vals["rmin"], vals["rmax"], vals["rstep"], vals["out"], vals["format"],
                     vals["threads"], tol, vals)


def _header(cfg: RunConfig):
    lines = [f"# diracstark {__version__} {cfg.subcommand}"]
    lines += [f"# {k}={fmt(v)}" for k, v in cfg.echo().items()]
    return lines


def _emit(cfg: RunConfig, text: str):
    if cfg.out is None:
        sys.stdout.write(text)
        return
    try:
        with open(cfg.out, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {cfg.out}: {exc}")


def _csv(cfg, columns, rows, tail=()):
    lines = _header(cfg) + [",".join(columns)]
    for r in rows:
        lines.append(r if isinstance(r, str) else ",".join(fmt(x) for x in r))
    lines += list(tail)
    return "\n".join(lines) + "\n"


def _json(cfg, payload):
    doc = {"config": {"subcommand": cfg.subcommand, "version": __version__, **cfg.echo()}}
    doc.update(payload)
    return json.dumps(doc, indent=1, allow_nan=True) + "\n"


def _samples(cfg, evaluate):
    """Run evaluate over the grid; gap edges and poles become comment lines."""
    rows, skipped = [], []
    for s in _map(cfg, evaluate, cfg.grid()):
        if not math.isfinite(s.rho):
            skipped.append((s.E, s.flag))
        else:
            rows.append(s)
    return rows, skipped


def _map(cfg, fn, items):
    if cfg.threads > 1 and len(items) > 64:
        chunks = max(1, len(items) // (4 * cfg.threads))
        with ProcessPoolExecutor(cfg.threads) as pool:
            return list(pool.map(fn, items, chunksize=chunks))
    return [fn(x) for x in items]


class _Free:
    def __init__(self, params):
        self.params = params

    def __call__(self, E):
        return zerofield.free_density(E, self.params)


class _Double:
    def __init__(self, params):
        self.params = params

    def __call__(self, E):
        return zerofield.double_delta_density(E, self.params)


class _Stark:
    def __init__(self, params):
        self.params = params
        self.ev = None

    def __call__(self, E):
        if self.ev is None:
            self.ev = starkfield.FieldEvaluator(self.params)
        return starkfield.stark_density(E, self.params, self.ev)

    def __getstate__(self):
        return {"params": self.params, "ev": None}


def _density_output(cfg, rows, skipped, flagged, extra_json=None, tail=()):
    if cfg.format == "json":
        samples = []
        for s in rows:
            d = {"E": s.E, "rho": s.rho, "is_gap": s.is_gap}
            if flagged:
                d["flag"] = s.flag or ""
            samples.append(d)
        payload = {"samples": samples, "skipped": [{"E": e, "reason": r} for e, r in skipped]}
        payload.update(extra_json or {})
        return _json(cfg, payload)
    cols = ["E", "rho", "is_gap"] + (["flag"] if flagged else [])
    body = [[s.E, s.rho, s.is_gap] + ([s.flag or ""] if flagged else []) for s in rows]
    notes = [f"# skipped E={fmt(e)} ({r})" for e, r in skipped]
    return _csv(cfg, cols, body, notes + list(tail))


def cmd_free_density(cfg: RunConfig) -> str:
    rows, skipped = _samples(cfg, _Free(cfg.params))
    return _density_output(cfg, rows, skipped, False)


def cmd_zero_field(cfg: RunConfig) -> str:
    rows, skipped = _samples(cfg, _Double(cfg.params))
    bs = zerofield.bound_states(cfg.params)
    levels = [(k, e) for k, e in (("ground", bs.ground), ("excited", bs.excited)) if e is not None]
    tail = ["# bound_states", "# kind,E"] + [f"# {k},{fmt(e)}" for k, e in levels]
    extra = {"bound_states": [{"kind": k, "E": e} for k, e in levels]}
    return _density_output(cfg, rows, skipped, False, extra, tail)


def cmd_stark_density(cfg: RunConfig) -> str:
    if not cfg.params.F > 0:
        raise UsageError("stark-density needs F > 0")
    rows, skipped = _samples(cfg, _Stark(cfg.params))
    return _density_output(cfg, rows, skipped, True)


def cmd_poles(cfg: RunConfig) -> str:
    if not cfg.params.F > 0:
        raise UsageError("poles needs F > 0")
    v = cfg.values
    p0 = cfg.params.with_(R=cfg.rmin)
    window = ((v["seed_re_min"], v["seed_re_max"]), (v["seed_im_min"], 0.0))
    seeds = poles.initial_seeds(p0, window)
    if not seeds:
        raise NumericalFailure("no starting pole converged")
    traces = poles.continue_in_R([e for _, e in seeds], p0, (cfg.rmin, cfg.rmax), cfg.rstep,
                                 workers=cfg.threads, labels=[lab for lab, _ in seeds])
    poles.classify_events(traces, **cfg.tolerances)
    if not any(t.records for t in traces):
        raise NumericalFailure("every branch failed")
    events = []
    for t in traces:
        for R, kind, partner in t.events:
            if t.branch_id < partner:
                events.append((R, t.branch_id, partner, kind))
    events.sort()
    if cfg.format == "json":
        return _json(cfg, {
            "branches": [{"branch": t.branch_id, "label": t.label, "failure": t.failure,
                          "flags": [list(f) for f in t.flags]} for t in traces],
            "samples": [{"branch": t.branch_id, "R": r.R, "re_E": r.E.real, "im_E": r.E.imag,
                         "residual": r.residual, "resolved": r.resolved}
                        for t in traces for r in t.records],
            "events": [{"R": R, "branch": a, "partner": b, "kind": k} for R, a, b, k in events],
        })
    rows = [[t.branch_id, r.R, r.E.real, r.E.imag, r.residual] for t in traces for r in t.records]
    tail = ["# branches", "# branch,label,status"]
    tail += [f"# {t.branch_id},{t.label},{'failed ' + t.failure if t.failure else 'ok'}" for t in traces]
    tail += [f"# collision,{t.branch_id},{fmt(f[1])},{f[2]}" for t in traces for f in t.flags]
    tail += ["# events", "# R,branch,partner,kind"]
    tail += [f"# {fmt(R)},{a},{b},{k}" for R, a, b, k in events]
    return _csv(cfg, ["branch", "R", "re_E", "im_E", "residual"], rows, tail)


def cmd_pcf_eval(ns) -> str:
    u = pcf.pcf_u(complex(ns.a_re, ns.a_im), complex(ns.z_re, ns.z_im))
    try:
        w = u.to_complex()
        return f"{fmt(w.real)} {fmt(w.imag)}\n"
    except OverflowError:
        return f"log {fmt(u.log_modulus)} {fmt(u.phase)}\n"


COMMANDS = {
    "free-density": cmd_free_density,
    "zero-field": cmd_zero_field,
    "stark-density": cmd_stark_density,
    "poles": cmd_poles,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def make_parser():
    parser = _Parser(prog="diracstark", description="Spectral densities and resonance poles "
                     "of a 1-D Dirac particle in two point wells and a constant field.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        for key, (typ, _) in OPTIONS.items():
            sp.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None)
        sp.add_argument("--config", default=None, help="key=value file; flags take precedence")
    dbg = sub.add_parser("pcf-eval", help="debug: print U(a, z)")
    for name in ("a_re", "a_im", "z_re", "z_im"):
        dbg.add_argument(name, type=float)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError("a subcommand is required")
        if ns.command == "pcf-eval":
            sys.stdout.write(cmd_pcf_eval(ns))
            return 0
        cfg = build_config(ns)
        text = COMMANDS[ns.command](cfg)
        _emit(cfg, text)
        return 0
    except UsageError as exc:
        print(f"diracstark: error: {exc}", file=sys.stderr)
        return 1
    except (NumericalFailure, ArithmeticError, poles.PoleError, pcf.PcfPrecisionError) as exc:
        print(f"diracstark: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
