"""Lindblad dynamics of the two-qubit waveguide system.

Two independent routes to rho(t):

* :func:`evolve` integrates the matrix-form right-hand side with an adaptive
  Dormand-Prince 5(4) pair and dense output.
* :func:`evolve_expm` exponentiates the column-stacked Liouvillian by scaling
  and squaring; it is the reference the integrator is checked against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _rk
from .errors import IntegrationError, PhysicalityError, ValidationError
from .operators import (
    TWO_PI,
    HilbertSpace,
    SystemParams,
    excitation_number,
    hamiltonian,
    lowering_ops,
)

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-8
PSD_TOL = 1e-8
NEGATIVITY_ABORT = 1e-6
RENORM_TOL = 1e-12
MAX_STEPS = 200_000_000


@dataclass(frozen=True)
class IntegratorOptions:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    initial_step: float | None = None

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step"):
            value = float(getattr(self, name))
            if not value > 0:
                raise ValidationError(name, f"must be > 0, got {value}")
            object.__setattr__(self, name, value)
        if self.initial_step is not None:
            value = float(self.initial_step)
            if not value > 0:
                raise ValidationError("initial_step", f"must be > 0, got {value}")
            object.__setattr__(self, "initial_step", value)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    params: SystemParams
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    def __len__(self):
        return len(self.times)


def check_density_matrix(rho, space: HilbertSpace | None = None):
    """Validate shape, Hermiticity, trace and positivity; return rho as an array."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValidationError("rho", f"expected a square matrix, got shape {rho.shape}")
    if space is not None and rho.shape[0] != space.total_dim:
        raise ValidationError("rho", f"dimension {rho.shape[0]} does not match space ({space.total_dim})")
    if not np.all(np.isfinite(rho)):
        raise ValidationError("rho", "non-finite entries")
    if np.max(np.abs(rho - rho.conj().T)) >= HERMITIAN_TOL:
        raise ValidationError("rho", "not Hermitian")
    if abs(np.trace(rho) - 1) >= TRACE_TOL:
        raise ValidationError("rho", f"trace {np.trace(rho).real:.3g} != 1")
    if np.linalg.eigvalsh(rho).min() < -PSD_TOL:
        raise ValidationError("rho", "not positive semidefinite")
    return rho


def initial_state(space: HilbertSpace):
    """|e>_A |g>_B |0> as a density matrix."""
    psi = np.zeros(space.total_dim, dtype=complex)
    psi[space.index(1, 0, 0)] = 1.0
    return np.outer(psi, psi.conj())


def collapse_operators(params: SystemParams):
    """Collapse operators with the rates folded in: sqrt(gamma) sigma_A/B, sqrt(kappa) a."""
    sm_a, sm_b, a = lowering_ops(params.space)
    rg = math.sqrt(TWO_PI * params.gamma)
    rk = math.sqrt(TWO_PI * params.kappa)
    return [rg * sm_a, rg * sm_b, rk * a]


def _dissipator(L, rho):
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def _rhs_function(params: SystemParams):
    h = hamiltonian(params)
    sm_a, sm_b, a = lowering_ops(params.space)
    g = TWO_PI * params.gamma
    k = TWO_PI * params.kappa

    def rhs(rho):
        out = -1j * (h @ rho - rho @ h)
        if g:
            out += g * (_dissipator(sm_a, rho) + _dissipator(sm_b, rho))
        if k:
            out += k * _dissipator(a, rho)
        return out

    return rhs


def lindblad_rhs(rho, params: SystemParams):
    """d(rho)/dt = -i[H, rho] + gamma sum_j D[sigma_j^-] rho + kappa D[a] rho (rad/ns)."""
    rho = np.asarray(rho, dtype=complex)
    d = params.space.total_dim
    if rho.shape != (d, d):
        raise ValidationError("rho", f"expected shape {(d, d)}, got {rho.shape}")
    return _rhs_function(params)(rho)


def vec(rho):
    """Column-stacking vectorization."""
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = math.isqrt(v.size)
    return v.reshape((dim, dim), order="F")


def liouvillian(params: SystemParams):
    """Superoperator L with vec(d rho/dt) = L vec(rho) under column stacking."""
    h = hamiltonian(params)
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    L = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for c in collapse_operators(params):
        if not np.any(c):
            continue
        cdc = c.conj().T @ c
        L += np.kron(c.conj(), c) - 0.5 * (np.kron(eye, cdc) + np.kron(cdc.T, eye))
    return L


def expm(a, taylor_degree=18):
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    a = np.asarray(a, dtype=complex)
    norm = np.linalg.norm(a, 1)
    s = 0 if norm <= 1.0 else int(math.ceil(math.log2(norm)))
    a = a / (2.0 ** s)
    eye = np.eye(a.shape[0], dtype=complex)
    # Horner form of sum_k a^k / k!
    out = eye.copy()
    for k in range(taylor_degree, 0, -1):
        out = eye + (a @ out) / k
    for _ in range(s):
        out = out @ out
    return out


def evolve_expm(rho0, params: SystemParams, t: float):
    """rho(t) = unvec(exp(L t) vec(rho0)); the reference propagator."""
    if t < 0:
        raise ValidationError("t", f"must be >= 0, got {t}")
    rho0 = np.asarray(rho0, dtype=complex)
    if t == 0:
        return rho0.copy()
    prop = expm(liouvillian(params) * t)
    return unvec(prop @ vec(rho0), rho0.shape[0])


def _reachable_support(rhs, rho0):
    """Indices (column-stacked) of rho entries that can ever become nonzero.

    The generator maps excitation sectors into each other sparsely, so entries
    outside the closure of rho0's support stay exactly zero. Integrating only
    the closure is exact, and it is what keeps long detuned runs affordable.
    """
    d = rho0.shape[0]
    frontier = [int(i) for i in np.flatnonzero(vec(rho0))]
    seen = set(frontier)
    columns = {}
    while frontier:
        idx = frontier.pop()
        if idx % d != idx // d:
            partner = (idx // d) + d * (idx % d)
            if partner not in seen:
                seen.add(partner)
                frontier.append(partner)
        basis = np.zeros(d * d, dtype=complex)
        basis[idx] = 1.0
        col = vec(rhs(unvec(basis, d)))
        columns[idx] = col
        for j in np.flatnonzero(col):
            j = int(j)
            if j not in seen:
                seen.add(j)
                frontier.append(j)
    support = np.array(sorted(seen), dtype=np.int64)
    M = np.stack([columns[i][support] for i in support], axis=1) if len(support) else np.zeros((0, 0), complex)
    return support, M


def evolve(rho0, params: SystemParams, t_grid, opts: IntegratorOptions | None = None) -> Trajectory:
    """Integrate the master equation and sample rho at every time in ``t_grid`` (ns)."""
    opts = opts or IntegratorOptions()
    space = params.space
    rho0 = check_density_matrix(rho0, space)
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 1:
        raise ValidationError("t_grid", "must be a non-empty 1-d array")
    if t_grid[0] != 0:
        raise ValidationError("t_grid", f"must start at 0, got {t_grid[0]}")
    if np.any(np.diff(t_grid) <= 0):
        raise ValidationError("t_grid", "must be strictly increasing")

    d = space.total_dim
    support, M = _reachable_support(_rhs_function(params), rho0)
    y0 = vec(rho0)[support].copy()

    pos = {int(v): i for i, v in enumerate(support)}
    conj_perm = np.array([pos[(v // d) + d * (v % d)] for v in support], dtype=np.int64)
    diag_idx = np.array([i for i, v in enumerate(support) if v % d == v // d], dtype=np.int64)

    if t_grid.size == 1:
        Y = y0[None, :]
        n_acc = n_rej = 0
        drift = 0.0
    else:
        Y, n_acc, n_rej, drift, status, t_fail = _rk.dopri5_grid(
            np.ascontiguousarray(M), y0, t_grid, opts.rel_tol, opts.abs_tol,
            opts.max_step, opts.initial_step or 0.0, conj_perm, diag_idx,
            RENORM_TOL, MAX_STEPS,
        )
        if status == _rk.STATUS_UNDERFLOW:
            raise IntegrationError("step size underflow", t_fail)
        if status == _rk.STATUS_MAX_STEPS:
            raise IntegrationError(f"exceeded {MAX_STEPS} steps", t_fail)

    states = np.zeros((t_grid.size, d * d), dtype=complex)
    states[:, support] = Y
    states = states.reshape(t_grid.size, d, d).transpose(0, 2, 1).copy()
    states[0] = rho0

    herm = float(np.max(np.abs(states - states.conj().transpose(0, 2, 1))))
    min_eig = float(np.linalg.eigvalsh(states).min())
    traces = np.trace(states, axis1=1, axis2=2).real
    if min_eig < -NEGATIVITY_ABORT:
        idx = int(np.argmin(np.linalg.eigvalsh(states).min(axis=1)))
        raise PhysicalityError(
            f"density matrix lost positivity: min eigenvalue {min_eig:.3g} at t = {t_grid[idx]:.6g} ns"
        )
    if drift >= TRACE_TOL:
        raise PhysicalityError(f"trace drift {drift:.3g} exceeds {TRACE_TOL:g}")

    n_exc = excitation_number(space).diagonal().real
    excitation = np.einsum("tii,i->t", states, n_exc).real
    diagnostics = {
        "n_accepted": int(n_acc),
        "n_rejected": int(n_rej),
        "support_size": int(support.size),
        "max_trace_drift": float(drift),
        "max_trace_error": float(np.max(np.abs(traces - 1))),
        "max_hermiticity_defect": herm,
        "min_eigenvalue": min_eig,
        "max_excitation_increase": float(max(0.0, np.max(np.diff(excitation), initial=0.0))),
    }
    return Trajectory(times=t_grid.copy(), states=states, params=params, diagnostics=diagnostics)
