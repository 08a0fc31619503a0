"""Run configuration: a small INI-style text format with strict keys.

Example::

    # wgqed-config v1
    [run]
    mode = sweep
    points = 2001

    [params]
    g_qw = 100 MHz
    kappa = 1 MHz

    [axis.1]
    parameter = gamma
    start = 1 MHz
    stop = 1 GHz
    num = 25
    scale = log

    [output]
    dir = results
    formats = csv, svg

Keys before the first section belong to ``[run]``. Frequencies accept a
``GHz`` or ``MHz`` suffix and default to GHz.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, fields

import numpy as np

from .dynamics import IntegratorOptions
from .errors import ValidationError
from .operators import SystemParams
from .sweep import PRESETS, SweepAxis

SCHEMA_VERSION = 1
HEADER = f"# wgqed-config v{SCHEMA_VERSION}"
MODES = ("trace", "metrics", "sweep", "preset")
FORMATS = ("csv", "svg")
UNITS = {"ghz": 1.0, "mhz": 1e-3}

_HEADER_RE = re.compile(r"#\s*wgqed-config\s+v(\d+)\s*$")
_QUANTITY_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?|[-+]?inf)\s*([A-Za-z]+)?\s*$")

RUN_KEYS = {"mode", "preset", "t_end", "points"}
PARAM_KEYS = {f.name for f in fields(SystemParams)}
INTEGRATOR_KEYS = {f.name for f in fields(IntegratorOptions)}
AXIS_KEYS = {"parameter", "values", "start", "stop", "num", "scale"}
OUTPUT_KEYS = {"dir", "formats"}


class ConfigError(ValidationError):
    def __init__(self, key, message, line=None):
        self.line = line
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(key, message)


@dataclass(frozen=True)
class RunConfig:
    mode: str = "metrics"
    preset: str | None = None
    params: SystemParams = SystemParams()
    axes: tuple = ()
    integrator: IntegratorOptions = IntegratorOptions()
    t_end: float | None = None
    points: int = 2001
    output: str = "."
    formats: tuple = FORMATS

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError("mode", f"must be one of {MODES}, got {self.mode!r}")
        if self.mode == "preset":
            if self.preset is None:
                raise ValidationError("preset", "mode = preset needs a preset name")
            if self.preset not in PRESETS:
                raise ValidationError("preset", f"unknown preset {self.preset!r}")
        if self.mode == "sweep" and not self.axes:
            raise ValidationError("axis", "mode = sweep needs at least one [axis.N] section")
        if len(self.axes) > 2:
            raise ValidationError("axis", f"at most 2 sweep axes, got {len(self.axes)}")
        if self.t_end is not None and not self.t_end > 0:
            raise ValidationError("t_end", f"must be > 0, got {self.t_end}")
        if self.points < 3:
            raise ValidationError("points", f"must be >= 3, got {self.points}")
        if not self.formats or any(f not in FORMATS for f in self.formats):
            raise ValidationError("formats", f"must be a non-empty subset of {FORMATS}, got {self.formats}")


def parse_quantity(text, key, units=True):
    """Parse '6', '6 GHz' or '50 MHz' into GHz."""
    m = _QUANTITY_RE.match(str(text))
    if not m:
        raise ValidationError(key, f"not a number: {text!r}")
    value = float(m.group(1))
    unit = m.group(2)
    if unit is not None:
        if not units or unit.lower() not in UNITS:
            raise ValidationError(key, f"unknown unit {unit!r} (expected GHz or MHz)")
        value *= UNITS[unit.lower()]
    return value


def _parse_int(text, key):
    try:
        return int(str(text).strip())
    except ValueError:
        raise ValidationError(key, f"not an integer: {text!r}") from None


def _split_list(text):
    return [item.strip() for item in str(text).split(",") if item.strip()]


def _check_keys(section, allowed, parser_section, lines):
    for key in parser_section:
        if key not in allowed:
            raise ConfigError(key, f"unknown key in [{section}]; allowed: {', '.join(sorted(allowed))}",
                              lines.get((section, key)))


def _key_lines(text, offset):
    """Map (section, key) to its 1-based source line for error reports."""
    out = {}
    section = "run"
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
        elif "=" in line and not line.startswith(("#", ";")):
            out[(section, line.split("=", 1)[0].strip())] = n - offset
    return out


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    first = next((ln.strip() for ln in text.splitlines() if ln.strip()), "")
    m = _HEADER_RE.match(first)
    if m and int(m.group(1)) != SCHEMA_VERSION:
        raise ConfigError("schema", f"unsupported config version v{m.group(1)} (expected v{SCHEMA_VERSION})")

    first_content = next((ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith(("#", ";"))), "")
    offset = 0
    if not first_content.startswith("["):
        text = "[run]\n" + text
        offset = 1

    parser = configparser.ConfigParser(interpolation=None, strict=True, default_section="\x00defaults",
                                       inline_comment_prefixes=None)
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.ParsingError as exc:
        lineno = exc.errors[0][0] - offset if exc.errors else None
        raise ConfigError("config", "malformed line", lineno) from None
    except (configparser.DuplicateOptionError, configparser.DuplicateSectionError) as exc:
        lineno = exc.lineno - offset if exc.lineno else None
        raise ConfigError(getattr(exc, "option", None) or exc.section, "duplicate entry", lineno) from None
    except configparser.Error as exc:
        raise ConfigError("config", exc.message) from None

    lines = _key_lines(text, offset)
    axis_sections = []
    for section in parser.sections():
        if section.startswith("axis."):
            axis_sections.append(section)
        elif section not in ("run", "params", "integrator", "output"):
            raise ConfigError(section, "unknown section")

    kw = {}
    if parser.has_section("run"):
        run = parser["run"]
        _check_keys("run", RUN_KEYS, run, lines)
        if "mode" in run:
            kw["mode"] = run["mode"].strip()
        if "preset" in run:
            kw["preset"] = run["preset"].strip()
        if "t_end" in run and run["t_end"].strip():
            kw["t_end"] = parse_quantity(run["t_end"], "t_end", units=False)
        if "points" in run:
            kw["points"] = _parse_int(run["points"], "points")

    if parser.has_section("params"):
        sec = parser["params"]
        _check_keys("params", PARAM_KEYS, sec, lines)
        values = {}
        for key, raw in sec.items():
            values[key] = _parse_int(raw, key) if key == "n_fock" else parse_quantity(raw, key)
        kw["params"] = SystemParams(**values)

    if parser.has_section("integrator"):
        sec = parser["integrator"]
        _check_keys("integrator", INTEGRATOR_KEYS, sec, lines)
        values = {k: parse_quantity(v, k, units=False) for k, v in sec.items() if v.strip()}
        kw["integrator"] = IntegratorOptions(**values)

    axes = []
    for section in sorted(axis_sections, key=lambda s: s.split(".", 1)[1]):
        sec = parser[section]
        _check_keys(section, AXIS_KEYS, sec, lines)
        axes.append(_parse_axis(section, sec))
    kw["axes"] = tuple(axes)

    if parser.has_section("output"):
        sec = parser["output"]
        _check_keys("output", OUTPUT_KEYS, sec, lines)
        if "dir" in sec:
            kw["output"] = sec["dir"].strip()
        if "formats" in sec:
            kw["formats"] = tuple(_split_list(sec["formats"]))

    return RunConfig(**kw)


def _parse_axis(section, sec):
    if "parameter" not in sec:
        raise ConfigError(section, "missing 'parameter'")
    name = sec["parameter"].strip()
    scale = sec.get("scale", "linear").strip()
    if "values" in sec:
        if any(k in sec for k in ("start", "stop", "num")):
            raise ConfigError(section, "give either 'values' or start/stop/num, not both")
        values = [parse_quantity(v, name) for v in _split_list(sec["values"])]
        return SweepAxis(name, values, scale)
    missing = [k for k in ("start", "stop", "num") if k not in sec]
    if missing:
        raise ConfigError(section, f"missing {', '.join(missing)}")
    start = parse_quantity(sec["start"], name)
    stop = parse_quantity(sec["stop"], name)
    num = _parse_int(sec["num"], "num")
    if num < 1:
        raise ValidationError(name, "sweep axis is empty")
    if scale == "log":
        if start <= 0:
            raise ValidationError(name, "log axis needs start > 0")
        return SweepAxis(name, np.geomspace(start, stop, num), "log")
    return SweepAxis(name, np.linspace(start, stop, num), scale)


def _fmt(x):
    return repr(float(x))


def render_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig; ``parse_config(render_config(c)) == c``."""
    out = [HEADER, "[run]", f"mode = {cfg.mode}"]
    if cfg.preset is not None:
        out.append(f"preset = {cfg.preset}")
    if cfg.t_end is not None:
        out.append(f"t_end = {_fmt(cfg.t_end)}")
    out.append(f"points = {cfg.points}")
    out += ["", "[params]"]
    for f in fields(SystemParams):
        value = getattr(cfg.params, f.name)
        out.append(f"{f.name} = {value if f.name == 'n_fock' else _fmt(value)}")
    out += ["", "[integrator]"]
    for f in fields(IntegratorOptions):
        value = getattr(cfg.integrator, f.name)
        if value is not None:
            out.append(f"{f.name} = {_fmt(value)}")
    for i, axis in enumerate(cfg.axes, start=1):
        out += ["", f"[axis.{i}]", f"parameter = {axis.parameter}",
                "values = " + ", ".join(_fmt(v) for v in axis.values), f"scale = {axis.scale}"]
    out += ["", "[output]", f"dir = {cfg.output}", "formats = " + ", ".join(cfg.formats)]
    return "\n".join(out) + "\n"


def parse_axis_spec(spec: str) -> SweepAxis:
    """Command-line axis: ``name=v1,v2,...`` or ``name=start:stop:num[:log]``."""
    if "=" not in spec:
        raise ValidationError("axis", f"expected name=values, got {spec!r}")
    name, rhs = (s.strip() for s in spec.split("=", 1))
    if ":" in rhs:
        parts = rhs.split(":")
        if len(parts) not in (3, 4):
            raise ValidationError("axis", f"expected start:stop:num[:log], got {rhs!r}")
        scale = parts[3].strip() if len(parts) == 4 else "linear"
        sec = {"parameter": name, "start": parts[0], "stop": parts[1], "num": parts[2], "scale": scale}
        return _parse_axis("axis", sec)
    values = [parse_quantity(v, name) for v in _split_list(rhs)]
    return SweepAxis(name, values, "linear")
