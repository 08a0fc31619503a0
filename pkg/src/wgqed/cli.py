"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .config import RunConfig, parse_axis_spec, parse_config, parse_quantity, render_config
from .dynamics import evolve, initial_state
from .errors import NumericalError, ValidationError
from .metrics import initial_window, simulate_transfer
from .output import emit_csv
from .sweep import PRESETS, TransferSettings, preset, run_preset_sweep, run_sweep
from .svg import emit_svg

PARAM_FLAGS = {
    "omega_w": "--omega-w",
    "omega_q": "--omega-q",
    "g_qw": "--g-qw",
    "gamma": "--gamma",
    "kappa": "--kappa",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        _diag(f"{self.prog}: {message}")
        raise SystemExit(1)


def _diag(message):
    color = sys.stderr.isatty() and "NO_COLOR" not in os.environ
    prefix = "\033[31merror:\033[0m " if color else "error: "
    print(prefix + message, file=sys.stderr)


def _common(p):
    p.add_argument("--config", type=Path, help="configuration file")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--formats", help="comma-separated subset of csv,svg")
    for name, flag in PARAM_FLAGS.items():
        p.add_argument(flag, dest=name, metavar="FREQ", help=f"{name} in GHz (or with MHz/GHz suffix)")
    p.add_argument("--n-fock", type=int, dest="n_fock")
    p.add_argument("--t-end", type=float, dest="t_end", help="simulated window in ns")
    p.add_argument("--points", type=int, help="output samples per window")


def build_parser():
    parser = _Parser(prog="wgqed", description="Two-qubit waveguide state-transfer simulator")
    sub = parser.add_subparsers(dest="command", metavar="{trace,metrics,sweep,preset,list-presets}", parser_class=_Parser)
    sub.required = True
    for name, help_ in (("trace", "population time traces"),
                        ("metrics", "fidelity and latency of one transfer"),
                        ("sweep", "fidelity/latency over a parameter grid")):
        p = sub.add_parser(name, help=help_)
        _common(p)
        if name == "sweep":
            p.add_argument("--axis", action="append", default=[],
                           help="name=v1,v2,... or name=start:stop:num[:log]; repeat for a second axis")
    p = sub.add_parser("preset", help="reproduce a figure configuration")
    p.add_argument("name", help="preset name, see list-presets")
    _common(p)
    sub.add_parser("list-presets", help="list the figure presets")
    return parser


def _overrides(args):
    out = {}
    for name in PARAM_FLAGS:
        raw = getattr(args, name, None)
        if raw is not None:
            out[name] = parse_quantity(raw, name)
    if getattr(args, "n_fock", None) is not None:
        out["n_fock"] = args.n_fock
    return out


def resolve_config(args) -> RunConfig:
    cfg = parse_config(args.config.read_text()) if args.config else RunConfig()
    changes = {"mode": args.command}
    if args.command == "preset":
        changes["preset"] = args.name
    params = cfg.params
    if args.command == "preset":
        params = preset(args.name).base
    params = replace(params, **_overrides(args))
    changes["params"] = params
    if getattr(args, "axis", None):
        changes["axes"] = tuple(parse_axis_spec(s) for s in args.axis)
    if args.t_end is not None:
        changes["t_end"] = args.t_end
    if args.points is not None:
        changes["points"] = args.points
    if args.out is not None:
        changes["output"] = str(args.out)
    if args.formats is not None:
        changes["formats"] = tuple(f.strip() for f in args.formats.split(",") if f.strip())
    if args.jobs < 1:
        raise ValidationError("jobs", f"must be >= 1, got {args.jobs}")
    return replace(cfg, **changes)


def _trace(params, cfg, t_end):
    if t_end is None:
        if params.g_qw <= 0:
            raise ValidationError("t_end", "needed when g_qw = 0")
        t_end = initial_window(params)
    return evolve(initial_state(params.space), params, np.linspace(0.0, t_end, cfg.points), cfg.integrator)


def _write(result, cfg, stem, style=None, quantity=None, title=""):
    out = Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    if "csv" in cfg.formats:
        written.append(emit_csv(result, out / f"{stem}.csv"))
    if "svg" in cfg.formats:
        written.append(emit_svg(result, out / f"{stem}.svg", style=style, quantity=quantity, title=title))
    cfg_path = out / f"{stem}.cfg"
    cfg_path.write_text(render_config(cfg))
    for path in written:
        print(path)


def run(args) -> int:
    if args.command == "list-presets":
        for p in PRESETS.values():
            print(f"{p.name}\t{p.kind}\t{p.description}")
        return 0
    cfg = resolve_config(args)
    if cfg.mode == "metrics":
        m = simulate_transfer(cfg.params, cfg.integrator, points=cfg.points, t_end=cfg.t_end)
        print(f"fidelity={m.fidelity:.6f}")
        print(f"latency_ns={m.latency:.6f}")
        return 0
    if cfg.mode == "trace":
        _write(_trace(cfg.params, cfg, cfg.t_end), cfg, "trace", title="state transfer trace")
        return 0
    if cfg.mode == "sweep":
        settings = TransferSettings(points=cfg.points, t_end=cfg.t_end)
        result = run_sweep(cfg.axes, cfg.params, cfg.integrator, jobs=args.jobs, settings=settings)
        _write(result, cfg, "sweep", title="parameter sweep")
        return 0
    p = preset(cfg.preset)
    title = f"{p.name}: {p.description}"
    if p.kind == "trace":
        t_end = cfg.t_end if cfg.t_end is not None else p.t_end
        cfg = replace(cfg, integrator=p.opts if args.config is None else cfg.integrator)
        _write(_trace(cfg.params, cfg, t_end), cfg, p.name, title=title)
        return 0
    settings = replace(p.settings, points=cfg.points) if args.points is not None else p.settings
    if cfg.t_end is not None:
        settings = replace(settings, t_end=cfg.t_end)
    p = replace(p, base=cfg.params, settings=settings)
    result = run_preset_sweep(p, jobs=args.jobs)
    _write(result, replace(cfg, integrator=p.opts), p.name, style=p.plot, quantity=p.quantity, title=title)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return run(args)
    except ValidationError as exc:
        _diag(str(exc))
        return 1
    except NumericalError as exc:
        _diag(f"numerical failure: {exc}")
        return 2
    except OSError as exc:
        _diag(str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
