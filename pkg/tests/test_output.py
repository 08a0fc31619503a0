import csv
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from wgqed.dynamics import evolve, initial_state
from wgqed.errors import ValidationError
from wgqed.metrics import excited_population
from wgqed.operators import SystemParams
from wgqed.output import TRACE_COLUMNS, emit_csv
from wgqed.svg import emit_svg, line_plot, nice_ticks, ramp_color, render
from wgqed.sweep import SweepAxis, run_sweep

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture(scope="module")
def trace():
    p = SystemParams(g_qw=0.1, kappa=0.01)
    return evolve(initial_state(p.space), p, np.linspace(0, 10, 51))


@pytest.fixture(scope="module")
def sweep2d():
    axes = [SweepAxis("g_qw", [0.0, 0.1, 0.2]), SweepAxis("gamma", [0.001, 0.01])]
    return run_sweep(axes, SystemParams())


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_trace_csv(tmp_path, trace):
    path = emit_csv(trace, tmp_path / "t.csv")
    raw = path.read_bytes()
    assert raw.startswith(b"time_ns,p_qubit_a,p_qubit_b,p_mode\r\n0.000000000000,1,0,0\r\n")
    rows = read_rows(path)
    assert tuple(rows[0]) == TRACE_COLUMNS
    assert len(rows) == 52
    pb = excited_population(trace, "B")
    for row, value in zip(rows[1:], pb):
        assert float(row[2]) == pytest.approx(value, rel=1e-11, abs=1e-300)


def test_sweep_csv(tmp_path, sweep2d):
    path = emit_csv(sweep2d, tmp_path / "s.csv")
    rows = read_rows(path)
    assert rows[0] == ["g_qw", "gamma", "fidelity", "latency_ns", "status"]
    assert len(rows) == 7
    assert rows[1] == ["0", "0.001", "", "", "no_peak"]
    ok = [r for r in rows[1:] if r[4] == "ok"]
    assert len(ok) == 4
    for row, cell in zip(rows[3:], sweep2d.cells[2:]):
        assert float(row[2]) == float(f"{cell.metrics.fidelity:.12g}")
        assert float(row[3]) == pytest.approx(cell.metrics.latency, rel=1e-11)


def test_csv_is_deterministic(tmp_path, sweep2d):
    a = emit_csv(sweep2d, tmp_path / "a.csv").read_bytes()
    again = run_sweep(sweep2d.axes, sweep2d.base)
    b = emit_csv(again, tmp_path / "b.csv").read_bytes()
    assert a == b


def test_csv_io_error(tmp_path, trace):
    with pytest.raises(OSError) as err:
        emit_csv(trace, tmp_path / "missing" / "t.csv")
    assert "missing" in str(err.value)


def test_trace_svg(tmp_path, trace):
    path = emit_svg(trace, tmp_path / "t.svg")
    root = ET.parse(path).getroot()
    assert root.tag == SVG_NS + "svg" and root.get("version") == "1.1"
    assert len(root.findall(f"{SVG_NS}polyline")) == 3
    labels = [t.text for t in root.iter(SVG_NS + "text")]
    assert {"P_A", "P_B", "P_mode"} <= set(labels)


def test_heatmap_svg(tmp_path, sweep2d):
    text = render(sweep2d)
    root = ET.fromstring(text.encode())
    rects = root.findall(f"{SVG_NS}rect")
    fills = [r.get("fill") for r in rects]
    # 6 data cells, one of them missing (g = 0)
    assert fills.count("#cccccc") >= 2  # cell plus legend swatch
    assert "no peak" in [t.text for t in root.iter(SVG_NS + "text")]
    assert render(sweep2d) == text


def test_lines_style_svg(sweep2d):
    root = ET.fromstring(render(sweep2d, style="lines").encode())
    assert len(root.findall(f"{SVG_NS}polyline")) == 2  # g = 0 row is all NaN
    with pytest.raises(ValidationError):
        line_plot([("a", [0, 1], [0, 1])] * 4, "x", "y")


def test_one_axis_sweep_svg():
    r = run_sweep([SweepAxis.logspace("g_qw", 0.05, 1, 4)], SystemParams())
    root = ET.fromstring(render(r, quantity="latency").encode())
    assert len(root.findall(f"{SVG_NS}polyline")) == 1


def test_series_overflow(tmp_path):
    axes = [SweepAxis("g_qw", [0.1, 0.2, 0.3, 0.4]), SweepAxis("gamma", [0.001, 0.01])]
    r = run_sweep(axes, SystemParams())
    with pytest.raises(ValidationError):
        render(r, style="lines")
    render(r)  # heatmap has no series limit


def test_helpers():
    assert nice_ticks(0, 1) == [0.0, 0.2, 0.4, 0.6, 0.8, 1.0]
    assert ramp_color(0.0) == "#440154"
    assert ramp_color(1.0) == "#fde725"
    assert ramp_color(float("nan")) == "#cccccc"
