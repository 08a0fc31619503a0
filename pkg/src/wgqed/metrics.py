"""Transfer fidelity and latency, plus the closed-form figures of merit.

Fidelity here is the peak excitation probability of the receiving qubit B,
and latency is the time of that peak. It is not a state fidelity F(rho, sigma).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import IntegratorOptions, Trajectory, evolve, initial_state
from .errors import NoPeakError, ValidationError, ZeroDenominatorError
from .operators import SLOTS, TWO_PI, SystemParams, projector

DEFAULT_POINTS = 2001
MAX_DOUBLINGS = 6
# Peaks whose height is within this relative margin of the global maximum count
# as ties; the earliest one wins.
PEAK_TIE_RTOL = 1e-2


@dataclass(frozen=True)
class TransferMetrics:
    fidelity: float
    latency: float
    peak_index: int
    window_end: float


def excited_population(traj: Trajectory, site: str):
    """Tr(rho(t) P_site) at every sample, clipped to [0, 1 + 1e-9]."""
    if site not in SLOTS:
        raise ValidationError("site", f"unknown site {site!r}; expected one of {SLOTS}")
    proj = projector(site, traj.params.space).diagonal().real
    pop = np.einsum("tii,i->t", traj.states, proj).real
    return np.clip(pop, 0.0, 1.0 + 1e-9)


def _parabola_vertex(t, y, i):
    """Vertex of the parabola through samples i-1, i, i+1, clamped to that bracket."""
    t0, t1, t2 = t[i - 1], t[i], t[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    d1 = (y1 - y0) / (t1 - t0)
    d2 = (y2 - y1) / (t2 - t1)
    curv = (d2 - d1) / (t2 - t0)
    if curv >= 0:
        return t1, y1
    # y(t) = y1 + slope (t - t1) + curv (t - t1)^2 with slope at t1
    slope = d1 + curv * (t1 - t0)
    dt = -slope / (2 * curv)
    dt = min(max(dt, t0 - t1), t2 - t1)
    return t1 + dt, y1 + slope * dt + curv * dt * dt


def find_peak(times, values, tie_rtol=PEAK_TIE_RTOL):
    """Locate the transfer peak of a sampled curve.

    Returns (time, height, index). Raises NoPeakError when there is no interior
    maximum: the curve is monotone, identically zero, or still rising at the end.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    n = values.size
    if n < 3 or not np.any(values > 0):
        raise NoPeakError("receiving population never rises", window_end=float(times[-1]))
    interior = np.flatnonzero(
        (values[1:-1] >= values[:-2]) & (values[1:-1] > values[2:])
    ) + 1
    if interior.size == 0:
        raise NoPeakError("receiving population is monotone over the window", window_end=float(times[-1]))
    refined = [_parabola_vertex(times, values, i) for i in interior]
    heights = np.array([h for _, h in refined])
    top = heights.max()
    if values[-1] > top:
        raise NoPeakError("receiving population still rising at window end", window_end=float(times[-1]))
    first = int(np.flatnonzero(heights >= top * (1 - tie_rtol))[0])
    # the excursion holding that peak ends where the curve falls below half maximum;
    # fast detuned ripples ride on it and the tallest one is the peak
    below = np.flatnonzero(values[interior[first]:] < 0.5 * top)
    stop = interior[first] + (below[0] if below.size else n)
    in_excursion = np.flatnonzero((interior >= interior[first]) & (interior < stop))
    k = int(in_excursion[np.argmax(heights[in_excursion])])
    t_peak, height = refined[k]
    return float(t_peak), float(height), int(interior[k])


def transfer_metrics(traj: Trajectory, tie_rtol=PEAK_TIE_RTOL) -> TransferMetrics:
    p_b = excited_population(traj, "B")
    t_peak, height, idx = find_peak(traj.times, p_b, tie_rtol)
    return TransferMetrics(
        fidelity=min(max(height, 0.0), 1.0),
        latency=t_peak,
        peak_index=idx,
        window_end=float(traj.times[-1]),
    )


def initial_window(params: SystemParams) -> float:
    """Four times the expected transfer time (resonant or dispersive estimate), in ns."""
    g = TWO_PI * params.g_qw
    delta = params.detuning
    if delta < params.g_qw:
        return 4 * math.pi / (math.sqrt(2) * g)
    return 4 * math.pi * (TWO_PI * delta) / (2 * g * g)


def simulate_transfer(
    params: SystemParams,
    opts: IntegratorOptions | None = None,
    *,
    points: int = DEFAULT_POINTS,
    t_end: float | None = None,
    max_horizon: float | None = None,
    max_doublings: int = MAX_DOUBLINGS,
) -> TransferMetrics:
    """Send an excitation from qubit A and measure arrival at qubit B.

    The window starts at ``t_end`` (or :func:`initial_window`) and is doubled
    until a peak appears, at most ``max_doublings`` times and never beyond
    ``max_horizon``.
    """
    if params.g_qw <= 0:
        raise NoPeakError("no coupling, qubit B is never excited", window_end=0.0)
    if points < 3:
        raise ValidationError("points", f"need at least 3 samples, got {points}")
    window = float(t_end) if t_end is not None else initial_window(params)
    if max_horizon is not None:
        window = min(window, max_horizon)
    rho0 = initial_state(params.space)
    for attempt in range(max_doublings + 1):
        traj = evolve(rho0, params, np.linspace(0.0, window, points), opts)
        try:
            return transfer_metrics(traj)
        except NoPeakError as exc:
            capped = max_horizon is not None and window >= max_horizon
            if attempt == max_doublings or capped:
                raise NoPeakError(f"{exc} (window {window:.6g} ns)", window_end=window) from None
        window *= 2
        if max_horizon is not None:
            window = min(window, max_horizon)
    raise AssertionError("unreachable")


def effective_coupling(g_qw: float, delta: float, gamma: float) -> float:
    """g / sqrt(delta^2 + gamma^2): a dimensionless scaling indicator, not a rate."""
    denom = math.hypot(delta, gamma)
    if denom == 0:
        raise ZeroDenominatorError("effective coupling undefined for delta = gamma = 0 (resonant, lossless)")
    return g_qw / denom


def quality_factor(params: SystemParams) -> float:
    """Q = (D^2 + gamma^2) / (2 g^2 gamma + kappa (D^2 + gamma^2)) * omega_w, all in GHz."""
    s = params.detuning**2 + params.gamma**2
    denom = 2 * params.g_qw**2 * params.gamma + params.kappa * s
    if denom == 0:
        raise ZeroDenominatorError("quality factor unbounded: denominator is zero")
    return s / denom * params.omega_w
