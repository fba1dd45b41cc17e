"""Critical quantum sensing with a driven qubit-photon system.

Closed-form oracles, truncated-Fock numerical dynamics, adiabatic ramp
scheduling, and Fisher-information / Monte-Carlo estimation pipelines.
"""

__version__ = "0.1.0"

from .analytic import AnalyticPoint, eigenvalue, energy_gap, evaluate
from .dynamics import EvolutionConfig, TrajectoryRecord, evolve, fidelity_against_dark
from .fockspace import (
    HilbertSpec,
    SparseOperator,
    StateVector,
    TruncationWarning,
    adaptive_n_max,
    build_hamiltonian,
    build_ladder_ops,
    eigenstate,
    squeezed_vacuum,
)
from .metrology import (
    MeasurementScheme,
    ScalingFit,
    estimate_eta,
    inverted_variance_numeric,
    sample_outcomes,
    scaling_experiment,
)
from .ramp import RampSchedule, eta_at, eta_dot_at, transition_probability

__all__ = [
    "AnalyticPoint",
    "EvolutionConfig",
    "HilbertSpec",
    "MeasurementScheme",
    "RampSchedule",
    "ScalingFit",
    "SparseOperator",
    "StateVector",
    "TrajectoryRecord",
    "TruncationWarning",
    "adaptive_n_max",
    "build_hamiltonian",
    "build_ladder_ops",
    "eigenstate",
    "eigenvalue",
    "energy_gap",
    "estimate_eta",
    "eta_at",
    "eta_dot_at",
    "evaluate",
    "evolve",
    "fidelity_against_dark",
    "inverted_variance_numeric",
    "sample_outcomes",
    "scaling_experiment",
    "squeezed_vacuum",
    "transition_probability",
    "__version__",
]
