"""Optimal boundary-link control for cutting and stitching a transverse-field Ising ring."""
from .control import (
    ControlSchedule,
    Linear,
    Polynomial,
    Pulsed,
    Task,
    admissible,
    evaluate,
    format_schedule,
    parse_schedule,
    quasi_linear,
    reverse_schedule,
)
from .errors import DegenerateGroundStateError, DomainError, LineSearchError
from .evolve import (
    EvolutionConfig,
    FidelityReport,
    evolve_state,
    fidelity,
    propagator,
    transform_fidelity,
)
from .operators import SpinChainSpec, boundary_commutator_residual, build_hamiltonian, pauli_site
from .optimize import (
    Axis,
    BFGSOptions,
    FidelityObjective,
    LandscapeGrid,
    OptimizationOutcome,
    landscape_scan,
    minimize,
    objective,
    optimize_schedule,
    sweep_horizon,
)
from .spectral import SpectralResult, eigendecompose, gap_scan, ground_state

__version__ = "0.1.0"
