"""Rectangular parameter sweeps of transfer fidelity/latency, and figure presets."""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import __version__
from .dynamics import IntegratorOptions
from .errors import NoPeakError, NumericalError, ValidationError
from .metrics import DEFAULT_POINTS, TransferMetrics, simulate_transfer
from .operators import SystemParams

# "loss" sets kappa and gamma together
AXIS_PARAMETERS = ("omega_w", "kappa", "gamma", "g_qw", "loss")
MAX_CELLS = 1_000_000
DETUNED_HORIZON = 1e4


@dataclass(frozen=True)
class SweepAxis:
    parameter: str
    values: tuple
    scale: str = "linear"

    def __post_init__(self):
        if self.parameter not in AXIS_PARAMETERS:
            raise ValidationError("axis", f"unknown sweep parameter {self.parameter!r}; expected one of {AXIS_PARAMETERS}")
        if self.scale not in ("linear", "log"):
            raise ValidationError("axis", f"scale must be 'linear' or 'log', got {self.scale!r}")
        values = tuple(float(v) for v in np.atleast_1d(np.asarray(self.values, dtype=float)))
        if not values:
            raise ValidationError(self.parameter, "sweep axis is empty")
        if not all(math.isfinite(v) for v in values):
            raise ValidationError(self.parameter, "sweep values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValidationError(self.parameter, "sweep values must be strictly increasing")
        low = values[0]
        if self.parameter == "omega_w" and low <= 0:
            raise ValidationError(self.parameter, "waveguide frequency must be > 0")
        if low < 0:
            raise ValidationError(self.parameter, f"must be >= 0, got {low}")
        object.__setattr__(self, "values", values)

    @classmethod
    def linspace(cls, parameter, start, stop, num):
        return cls(parameter, np.linspace(start, stop, num), "linear")

    @classmethod
    def logspace(cls, parameter, start, stop, num):
        return cls(parameter, np.geomspace(start, stop, num), "log")

    def __len__(self):
        return len(self.values)


def apply_point(base: SystemParams, names, point) -> SystemParams:
    changes = {}
    for name, value in zip(names, point):
        if name == "loss":
            changes["kappa"] = value
            changes["gamma"] = value
        else:
            changes[name] = value
    return replace(base, **changes)


@dataclass(frozen=True)
class SweepCell:
    point: tuple
    metrics: TransferMetrics | None
    status: str = "ok"  # ok | no_peak | failed
    message: str = ""


@dataclass
class SweepResult:
    axes: list
    base: SystemParams
    cells: list
    provenance: dict = field(default_factory=dict)

    @property
    def shape(self):
        return tuple(len(a) for a in self.axes)

    def grid(self, quantity="fidelity"):
        """Metric values reshaped onto the axes grid; failed cells are NaN."""
        out = np.full(len(self.cells), np.nan)
        for i, cell in enumerate(self.cells):
            if cell.metrics is not None:
                out[i] = getattr(cell.metrics, quantity)
        return out.reshape(self.shape)


@dataclass(frozen=True)
class TransferSettings:
    points: int = DEFAULT_POINTS
    max_horizon: float | None = None
    t_end: float | None = None


def _run_cell(task):
    params, opts, settings = task
    try:
        m = simulate_transfer(
            params, opts, points=settings.points, t_end=settings.t_end, max_horizon=settings.max_horizon
        )
    except NoPeakError as exc:
        return None, "no_peak", str(exc)
    except NumericalError as exc:
        return None, "failed", str(exc)
    return m, "ok", ""


def run_sweep(axes, base: SystemParams, opts: IntegratorOptions | None = None, *,
              jobs: int = 1, settings: TransferSettings | None = None) -> SweepResult:
    """Evaluate simulate_transfer on the Cartesian grid of ``axes`` (row-major)."""
    axes = list(axes)
    opts = opts or IntegratorOptions()
    settings = settings or TransferSettings()
    if not 1 <= len(axes) <= 2:
        raise ValidationError("axes", f"need 1 or 2 sweep axes, got {len(axes)}")
    names = [a.parameter for a in axes]
    if len(set(names)) != len(names) or ("loss" in names and ({"kappa", "gamma"} & set(names))):
        raise ValidationError("axes", f"axes overlap: {names}")
    n_cells = math.prod(len(a) for a in axes)
    if n_cells > MAX_CELLS:
        raise ValidationError("axes", f"grid of {n_cells} cells exceeds {MAX_CELLS}")
    if jobs < 1:
        raise ValidationError("jobs", f"must be >= 1, got {jobs}")

    points = list(itertools.product(*(a.values for a in axes)))
    # builds every SystemParams up front so invalid combinations fail before any work
    tasks = [(apply_point(base, names, p), opts, settings) for p in points]

    if jobs == 1 or n_cells == 1:
        outcomes = list(map(_run_cell, tasks))
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_cell, tasks, chunksize=max(1, n_cells // (4 * jobs))))

    cells = [SweepCell(p, m, s, msg) for p, (m, s, msg) in zip(points, outcomes)]
    provenance = {
        "version": __version__,
        "integrator": asdict(opts),
        "points": settings.points,
        "max_horizon": settings.max_horizon,
        "t_end": settings.t_end,
    }
    if "loss" in names:
        provenance["loss_axis"] = "kappa = gamma = loss"
    return SweepResult(axes=axes, base=base, cells=cells, provenance=provenance)


@dataclass(frozen=True)
class Preset:
    name: str
    kind: str  # trace | sweep
    base: SystemParams
    axes: tuple = ()
    opts: IntegratorOptions = IntegratorOptions()
    settings: TransferSettings = TransferSettings()
    t_end: float | None = None
    plot: str = "lines"  # lines | heatmap
    quantity: str = "fidelity"
    description: str = ""


RESONANT = SystemParams(omega_q=6.0, omega_w=6.0)
LOSS_AXIS = SweepAxis.logspace("loss", 1e-3, 1.0, 25)
G_AXIS = SweepAxis.logspace("g_qw", 0.05, 1.0, 20)
SERIES_G = SweepAxis("g_qw", (0.05, 0.1, 0.5))
DETUNED_OPTS = IntegratorOptions(rel_tol=1e-7, abs_tol=1e-10)


def _presets():
    lossy = dict(kappa=0.001, gamma=0.001)
    table = [
        Preset("fig2a", "trace", RESONANT.with_(g_qw=0.05), t_end=50.0,
               description="resonant, lossless, g = 50 MHz"),
        Preset("fig2b", "trace", RESONANT.with_(g_qw=0.1), t_end=50.0,
               description="resonant, lossless, g = 100 MHz"),
        Preset("fig2c", "trace", RESONANT.with_(g_qw=0.1, **lossy), t_end=100.0,
               description="resonant, kappa = gamma = 1 MHz, g = 100 MHz"),
        Preset("fig3a", "sweep", RESONANT.with_(gamma=0.0),
               axes=(SERIES_G, SweepAxis.logspace("kappa", 1e-3, 1.0, 25)),
               description="fidelity vs waveguide decay for several g (gamma = 0)"),
        Preset("fig3b", "sweep", RESONANT.with_(kappa=0.0),
               axes=(SERIES_G, SweepAxis.logspace("gamma", 1e-3, 1.0, 25)),
               description="fidelity vs qubit decay for several g (kappa = 0)"),
        Preset("fig3c", "sweep", RESONANT, axes=(G_AXIS,), quantity="latency",
               description="latency vs g, lossless"),
        Preset("fig4a", "trace", RESONANT.with_(omega_w=7.0, g_qw=0.1, **lossy), t_end=200.0,
               description="omega_w = 7 GHz, kappa = gamma = 1 MHz, g = 100 MHz"),
        Preset("fig4b", "trace", RESONANT.with_(omega_w=8.0, g_qw=0.1, **lossy), t_end=200.0,
               description="omega_w = 8 GHz, kappa = gamma = 1 MHz, g = 100 MHz"),
        Preset("fig4c", "sweep", RESONANT.with_(**lossy),
               axes=(SweepAxis("omega_w", (7.0, 8.0, 10.0)), G_AXIS), quantity="latency",
               settings=TransferSettings(max_horizon=DETUNED_HORIZON),
               description="latency vs g for three detunings, kappa = gamma = 1 MHz"),
    ]
    for tag, ww in (("fig5a", 10.0), ("fig5b", 20.0), ("fig5c", 50.0)):
        table.append(Preset(
            tag, "sweep", RESONANT.with_(omega_w=ww), axes=(LOSS_AXIS, G_AXIS),
            opts=DETUNED_OPTS, settings=TransferSettings(max_horizon=DETUNED_HORIZON),
            plot="heatmap", description=f"fidelity over losses (kappa = gamma) and g, omega_w = {ww:g} GHz",
        ))
    return {p.name: p for p in table}


PRESETS = _presets()


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ValidationError("preset", f"unknown preset {name!r}; known: {', '.join(PRESETS)}") from None


def run_preset_sweep(p: Preset, jobs: int = 1) -> SweepResult:
    if p.kind != "sweep":
        raise ValidationError("preset", f"{p.name} is a time-trace preset")
    result = run_sweep(p.axes, p.base, p.opts, jobs=jobs, settings=p.settings)
    result.provenance["preset"] = p.name
    return result
