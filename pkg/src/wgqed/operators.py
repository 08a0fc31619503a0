"""Dense operators on qubit A x qubit B x waveguide mode, and the system Hamiltonian.

Conventions used throughout the package:

* Frequencies and rates are ordinary frequencies in GHz at the API surface.
  Internally every one of them is multiplied by 2*pi (angular, rad/ns);
  time is in ns and hbar = 1.
* Tensor factor order is (A, B, mode). Qubit index 0 is |g>, 1 is |e>;
  the mode index is the photon number. The product state (iA, iB, n)
  therefore sits at row ``iA * 2 * n_fock + iB * n_fock + n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ValidationError

TWO_PI = 2.0 * math.pi
SLOTS = ("A", "B", "mode")
MAX_FOCK = 5


@dataclass(frozen=True)
class HilbertSpace:
    n_fock: int = 2

    def __post_init__(self):
        if isinstance(self.n_fock, bool) or int(self.n_fock) != self.n_fock:
            raise ValidationError("n_fock", f"must be an integer, got {self.n_fock!r}")
        if not 2 <= self.n_fock <= MAX_FOCK:
            raise ValidationError("n_fock", f"must lie in [2, {MAX_FOCK}], got {self.n_fock}")
        object.__setattr__(self, "n_fock", int(self.n_fock))

    @property
    def total_dim(self) -> int:
        return 4 * self.n_fock

    def local_dim(self, slot: str) -> int:
        if slot not in SLOTS:
            raise ValidationError("slot", f"unknown slot {slot!r}; expected one of {SLOTS}")
        return self.n_fock if slot == "mode" else 2

    def index(self, i_a: int, i_b: int, n: int) -> int:
        if i_a not in (0, 1) or i_b not in (0, 1) or not 0 <= n < self.n_fock:
            raise ValidationError("basis", f"no basis state ({i_a}, {i_b}, {n})")
        return i_a * 2 * self.n_fock + i_b * self.n_fock + n

    def labels(self):
        """Basis labels like ``'e,g,0'`` in row order."""
        q = "ge"
        return [f"{q[a]},{q[b]},{n}" for a in (0, 1) for b in (0, 1) for n in range(self.n_fock)]


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters, all frequencies/rates in GHz (ordinary frequency)."""

    omega_q: float = 6.0
    omega_w: float = 6.0
    g_qw: float = 0.05
    gamma: float = 0.0
    kappa: float = 0.0
    n_fock: int = 2

    def __post_init__(self):
        for name in ("omega_q", "omega_w", "g_qw", "gamma", "kappa"):
            value = getattr(self, name)
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ValidationError(name, f"not a number: {value!r}") from None
            if not math.isfinite(value):
                raise ValidationError(name, f"must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega_q <= 0:
            raise ValidationError("omega_q", f"must be > 0, got {self.omega_q}")
        if self.omega_w <= 0:
            raise ValidationError("omega_w", f"must be > 0, got {self.omega_w}")
        for name in ("g_qw", "gamma", "kappa"):
            if getattr(self, name) < 0:
                raise ValidationError(name, f"must be >= 0, got {getattr(self, name)}")
        # validates n_fock
        object.__setattr__(self, "n_fock", HilbertSpace(self.n_fock).n_fock)

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(self.n_fock)

    @property
    def detuning(self) -> float:
        """|omega_q - omega_w| in GHz."""
        return abs(self.omega_q - self.omega_w)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


def kron(a, b):
    """Kronecker product of two square matrices."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    for m in (a, b):
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValidationError("kron", f"expected square matrices, got shape {m.shape}")
    return np.kron(a, b)


def annihilation(n_fock: int):
    """Truncated photon annihilation operator, a|n> = sqrt(n)|n-1>."""
    if n_fock < 2:
        raise ValidationError("n_fock", f"truncation must keep at least one photon, got {n_fock}")
    return np.diag(np.sqrt(np.arange(1, n_fock)), k=1).astype(complex)


def qubit_lowering():
    """sigma^- = |g><e| with |g> at index 0."""
    return np.array([[0, 1], [0, 0]], dtype=complex)


def embed(op, slot: str, space: HilbertSpace):
    """Lift a local operator on ``slot`` to the full space as I x .. x op x .. x I."""
    op = np.asarray(op, dtype=complex)
    expected = space.local_dim(slot)
    if op.shape != (expected, expected):
        raise ValidationError("embed", f"slot {slot} needs a {expected}x{expected} operator, got {op.shape}")
    factors = [np.eye(space.local_dim(s), dtype=complex) for s in SLOTS]
    factors[SLOTS.index(slot)] = op
    out = factors[0]
    for f in factors[1:]:
        out = kron(out, f)
    return out


def lowering_ops(space: HilbertSpace):
    """Return (sigma_A^-, sigma_B^-, a) embedded in ``space``."""
    sm = qubit_lowering()
    return (
        embed(sm, "A", space),
        embed(sm, "B", space),
        embed(annihilation(space.n_fock), "mode", space),
    )


def projector(slot: str, space: HilbertSpace):
    """Excitation projector of a site: sigma^+ sigma^- for qubits, a^dag a for the mode."""
    if slot == "mode":
        a = annihilation(space.n_fock)
        return embed(a.conj().T @ a, "mode", space)
    sm = qubit_lowering()
    return embed(sm.conj().T @ sm, slot, space)


def excitation_number(space: HilbertSpace):
    """Total excitation number N = n_A + n_B + n_mode (diagonal)."""
    return sum(projector(s, space) for s in SLOTS)


def hamiltonian(params: SystemParams):
    """H/hbar in rad/ns for the two-qubit + single-mode model.

    Both qubits share one frequency ``omega_q`` and one coupling ``g_qw``.
    """
    space = params.space
    sm_a, sm_b, a = lowering_ops(space)
    wq = TWO_PI * params.omega_q
    ww = TWO_PI * params.omega_w
    g = TWO_PI * params.g_qw
    h = wq * (sm_a.conj().T @ sm_a + sm_b.conj().T @ sm_b) + ww * (a.conj().T @ a)
    coupling = sm_a.conj().T @ a + sm_b.conj().T @ a
    h = h + g * (coupling + coupling.conj().T)
    return h
