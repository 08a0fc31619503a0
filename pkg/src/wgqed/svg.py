"""Standalone SVG 1.1 line plots and heatmaps, no plotting dependencies."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .dynamics import Trajectory
from .errors import ValidationError
from .metrics import excited_population
from .sweep import SweepResult

WIDTH, HEIGHT = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 72, 150, 36, 56
MAX_SERIES = 3
COLORS = ("#1f77b4", "#d62728", "#2ca02c")
# linear ramp through these stops (dark blue -> teal -> yellow)
RAMP = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
        (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))
MISSING = "#cccccc"

LABELS = {
    "omega_w": "waveguide frequency (GHz)",
    "kappa": "waveguide decay kappa (GHz)",
    "gamma": "qubit decay gamma (GHz)",
    "g_qw": "coupling g (GHz)",
    "loss": "loss kappa = gamma (GHz)",
    "fidelity": "fidelity",
    "latency": "latency (ns)",
}


def _num(x):
    return f"{x:.2f}"


def _label(v):
    return f"{v:.3g}"


def nice_ticks(lo, hi, n=5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12) + 0.0)
        v += step
    return ticks


class _Axis:
    def __init__(self, lo, hi, p0, p1, log=False):
        if log and lo <= 0:
            log = False
        if hi == lo:
            pad = abs(lo) * 0.05 or 0.5
            lo, hi = lo - pad, hi + pad
        self.lo, self.hi, self.p0, self.p1, self.log = lo, hi, p0, p1, log

    def __call__(self, v):
        if self.log:
            f = (math.log10(v) - math.log10(self.lo)) / (math.log10(self.hi) - math.log10(self.lo))
        else:
            f = (v - self.lo) / (self.hi - self.lo)
        return self.p0 + f * (self.p1 - self.p0)

    def ticks(self):
        if self.log:
            decades = range(math.ceil(math.log10(self.lo) - 1e-9), math.floor(math.log10(self.hi) + 1e-9) + 1)
            ticks = [10.0 ** k for k in decades]
            if len(ticks) >= 2:
                return ticks
            return [self.lo, self.hi]
        return nice_ticks(self.lo, self.hi)


class _Doc:
    def __init__(self, title):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
            '<!DOCTYPE svg PUBLIC "-//W3C//DTD SVG 1.1//EN" "http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd">',
            f'<svg version="1.1" xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="Helvetica, Arial, sans-serif" font-size="12">',
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        ]
        if title:
            self.text(WIDTH / 2, 20, title, anchor="middle", size=14)

    def text(self, x, y, s, anchor="start", size=None, rotate=None):
        extra = f' font-size="{size}"' if size else ""
        if rotate is not None:
            extra += f' transform="rotate({rotate} {_num(x)} {_num(y)})"'
        self.parts.append(f'<text x="{_num(x)}" y="{_num(y)}" text-anchor="{anchor}"{extra}>{escape(str(s))}</text>')

    def line(self, x1, y1, x2, y2, stroke="black", width=1):
        self.parts.append(f'<line x1="{_num(x1)}" y1="{_num(y1)}" x2="{_num(x2)}" y2="{_num(y2)}" '
                          f'stroke="{stroke}" stroke-width="{width}"/>')

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.parts.append(f'<rect x="{_num(x)}" y="{_num(y)}" width="{_num(w)}" height="{_num(h)}" '
                          f'fill="{fill}" stroke="{stroke}"/>')

    def polyline(self, pts, stroke):
        coords = " ".join(f"{_num(x)},{_num(y)}" for x, y in pts)
        self.parts.append(f'<polyline points="{coords}" fill="none" stroke="{stroke}" stroke-width="1.5"/>')

    def render(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _frame(doc, xa, ya, xlabel, ylabel):
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    doc.rect(x0, y1, x1 - x0, y0 - y1, "none", stroke="black")
    for t in xa.ticks():
        px = xa(t)
        doc.line(px, y0, px, y0 + 5)
        doc.text(px, y0 + 18, _label(t), anchor="middle")
    for t in ya.ticks():
        py = ya(t)
        doc.line(x0 - 5, py, x0, py)
        doc.text(x0 - 8, py + 4, _label(t), anchor="end")
    doc.text((x0 + x1) / 2, HEIGHT - 14, xlabel, anchor="middle")
    doc.text(18, (y0 + y1) / 2, ylabel, anchor="middle", rotate=-90)


def line_plot(series, xlabel, ylabel, title="", xlog=False):
    """``series`` is a list of (label, xs, ys); NaN values break the line."""
    if not series:
        raise ValidationError("series", "nothing to plot")
    if len(series) > MAX_SERIES:
        raise ValidationError("series", f"series-count overflow: {len(series)} > {MAX_SERIES}")
    xs_all = np.concatenate([np.asarray(s[1], float) for s in series])
    ys_all = np.concatenate([np.asarray(s[2], float) for s in series])
    ys_ok = ys_all[np.isfinite(ys_all)]
    if xs_all.size == 0:
        raise ValidationError("series", "empty series")
    ylo, yhi = (float(ys_ok.min()), float(ys_ok.max())) if ys_ok.size else (0.0, 1.0)
    ylo = min(ylo, 0.0)
    xa = _Axis(float(xs_all.min()), float(xs_all.max()), LEFT, WIDTH - RIGHT, log=xlog)
    ya = _Axis(ylo, yhi, HEIGHT - BOTTOM, TOP)
    doc = _Doc(title)
    _frame(doc, xa, ya, xlabel, ylabel)
    for k, (label, xs, ys) in enumerate(series):
        color = COLORS[k]
        segment = []
        for x, y in zip(xs, ys):
            if math.isfinite(y):
                segment.append((xa(x), ya(y)))
            else:
                if len(segment) > 1:
                    doc.polyline(segment, color)
                segment = []
        if len(segment) > 1:
            doc.polyline(segment, color)
        elif len(segment) == 1:
            doc.parts.append(f'<circle cx="{_num(segment[0][0])}" cy="{_num(segment[0][1])}" r="2.5" fill="{color}"/>')
        ly = TOP + 16 + 20 * k
        lx = WIDTH - RIGHT + 12
        doc.line(lx, ly - 4, lx + 22, ly - 4, stroke=color, width=2)
        doc.text(lx + 28, ly, label)
    return doc.render()


def ramp_color(f):
    if not math.isfinite(f):
        return MISSING
    f = min(max(f, 0.0), 1.0)
    for (f0, c0), (f1, c1) in zip(RAMP, RAMP[1:]):
        if f <= f1:
            w = (f - f0) / (f1 - f0)
            rgb = [round(a + w * (b - a)) for a, b in zip(c0, c1)]
            return "#%02x%02x%02x" % tuple(rgb)
    return "#%02x%02x%02x" % RAMP[-1][1]


def heatmap(xvals, yvals, z, xlabel, ylabel, zlabel, title=""):
    """Rectangle grid, one cell per (x, y) sample; ``z`` has shape (len(x), len(y))."""
    z = np.asarray(z, float)
    nx, ny = len(xvals), len(yvals)
    if z.shape != (nx, ny) or nx == 0 or ny == 0:
        raise ValidationError("heatmap", f"grid shape {z.shape} does not match axes ({nx}, {ny})")
    ok = z[np.isfinite(z)]
    zlo, zhi = (float(ok.min()), float(ok.max())) if ok.size else (0.0, 1.0)
    if zhi == zlo:
        zhi = zlo + 1.0
    doc = _Doc(title)
    x0, x1 = LEFT, WIDTH - RIGHT
    y0, y1 = HEIGHT - BOTTOM, TOP
    cw, ch = (x1 - x0) / nx, (y0 - y1) / ny
    for i in range(nx):
        for j in range(ny):
            f = (z[i, j] - zlo) / (zhi - zlo)
            doc.rect(x0 + i * cw, y0 - (j + 1) * ch, cw, ch, ramp_color(f))
    doc.rect(x0, y1, x1 - x0, y0 - y1, "none", stroke="black")
    for i in sorted(set(np.linspace(0, nx - 1, min(nx, 6)).round().astype(int))):
        px = x0 + (i + 0.5) * cw
        doc.line(px, y0, px, y0 + 5)
        doc.text(px, y0 + 18, _label(xvals[i]), anchor="middle")
    for j in sorted(set(np.linspace(0, ny - 1, min(ny, 6)).round().astype(int))):
        py = y0 - (j + 0.5) * ch
        doc.line(x0 - 5, py, x0, py)
        doc.text(x0 - 8, py + 4, _label(yvals[j]), anchor="end")
    doc.text((x0 + x1) / 2, HEIGHT - 14, xlabel, anchor="middle")
    doc.text(18, (y0 + y1) / 2, ylabel, anchor="middle", rotate=-90)
    # color legend
    bx, bw, steps = x1 + 24, 16, 50
    bh = (y0 - y1) / steps
    for k in range(steps):
        doc.rect(bx, y0 - (k + 1) * bh, bw, bh + 0.5, ramp_color((k + 0.5) / steps))
    doc.rect(bx, y1, bw, y0 - y1, "none", stroke="black")
    for f in (0.0, 0.5, 1.0):
        py = y0 - f * (y0 - y1)
        doc.text(bx + bw + 6, py + 4, _label(zlo + f * (zhi - zlo)))
    doc.text(bx, y1 - 8, zlabel)
    if ok.size < z.size:
        doc.rect(bx, y0 + 22, 12, 12, MISSING, stroke="black")
        doc.text(bx + 18, y0 + 32, "no peak")
    return doc.render()


def render(result, *, style=None, quantity=None, title=""):
    """SVG text for a Trajectory or SweepResult."""
    if isinstance(result, Trajectory):
        series = [(name, result.times, excited_population(result, site))
                  for name, site in (("P_A", "A"), ("P_B", "B"), ("P_mode", "mode"))]
        return line_plot(series, "time (ns)", "excitation probability", title)
    if not isinstance(result, SweepResult):
        raise ValidationError("result", f"cannot plot {type(result).__name__}")
    quantity = quantity or "fidelity"
    grid = result.grid(quantity)
    axes = result.axes
    if len(axes) == 1:
        ax = axes[0]
        return line_plot([(quantity, ax.values, grid)], LABELS[ax.parameter], LABELS[quantity], title,
                         xlog=ax.scale == "log")
    if style == "lines":
        outer, inner = axes
        if len(outer) > MAX_SERIES:
            raise ValidationError("series", f"series-count overflow: {len(outer)} > {MAX_SERIES}")
        series = [(f"{outer.parameter} = {_label(v)}", inner.values, grid[k]) for k, v in enumerate(outer.values)]
        return line_plot(series, LABELS[inner.parameter], LABELS[quantity], title, xlog=inner.scale == "log")
    xa, ya = axes
    return heatmap(xa.values, ya.values, grid, LABELS[xa.parameter], LABELS[ya.parameter], LABELS[quantity], title)


def emit_svg(result, path, *, style=None, quantity=None, title=""):
    path = Path(path)
    text = render(result, style=style, quantity=quantity, title=title)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
