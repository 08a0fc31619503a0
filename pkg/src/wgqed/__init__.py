"""Photon-mediated state transfer between two qubits sharing a waveguide mode."""

__version__ = "0.1.0"

from .dynamics import (  # noqa: E402
    IntegratorOptions,
    Trajectory,
    evolve,
    evolve_expm,
    initial_state,
    lindblad_rhs,
    liouvillian,
)
from .errors import (  # noqa: E402
    IntegrationError,
    NoPeakError,
    NumericalError,
    PhysicalityError,
    ValidationError,
    ZeroDenominatorError,
)
from .metrics import (  # noqa: E402
    TransferMetrics,
    effective_coupling,
    excited_population,
    quality_factor,
    simulate_transfer,
    transfer_metrics,
)
from .operators import HilbertSpace, SystemParams, hamiltonian  # noqa: E402
from .sweep import SweepAxis, SweepResult, preset, run_sweep  # noqa: E402
