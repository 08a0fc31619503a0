"""CSV tables for time traces and sweeps."""

from __future__ import annotations

import csv
from pathlib import Path

from .dynamics import Trajectory
from .errors import ValidationError
from .metrics import excited_population
from .sweep import SweepResult

TRACE_COLUMNS = ("time_ns", "p_qubit_a", "p_qubit_b", "p_mode")


def fmt_time(t):
    return f"{t:.12f}"


def fmt_value(x):
    """12 significant digits."""
    return f"{x:.12g}"


def trace_rows(traj: Trajectory):
    pops = [excited_population(traj, s) for s in ("A", "B", "mode")]
    for i, t in enumerate(traj.times):
        yield [fmt_time(t)] + [fmt_value(p[i]) for p in pops]


def sweep_rows(result: SweepResult):
    for cell in result.cells:
        row = [fmt_value(v) for v in cell.point]
        if cell.metrics is None:
            row += ["", ""]
        else:
            row += [fmt_value(cell.metrics.fidelity), fmt_value(cell.metrics.latency)]
        row.append(cell.status)
        yield row


def emit_csv(result, path):
    """Write a Trajectory or SweepResult as CSV (header first, CRLF line ends)."""
    path = Path(path)
    if isinstance(result, Trajectory):
        header, rows = TRACE_COLUMNS, trace_rows(result)
    elif isinstance(result, SweepResult):
        header = [a.parameter for a in result.axes] + ["fidelity", "latency_ns", "status"]
        rows = sweep_rows(result)
    else:
        raise ValidationError("result", f"cannot write {type(result).__name__} as CSV")
    try:
        with path.open("w", newline="", encoding="ascii") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return path
