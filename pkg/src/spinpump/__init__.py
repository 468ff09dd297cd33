"""Two-tone driven spin qubit simulator.

Library for the quantised energy conversion between two drive tones of
a spin-1/2, its degradation under Ornstein-Uhlenbeck dephasing, and its
restoration by an interleaved pi-pulse sequence; includes the lattice
band-invariant computation that the pumping rate is quantised against.
"""

__version__ = "0.1.0"

from .drive import DriveParams, FieldVector, LabFrameParams
from .ensemble import EnsembleResult, ExperimentConfig, run_ensemble, sweep_correlation_time, sweep_m
from .errors import (
    ConfigError,
    ContractError,
    CriticalPointError,
    DegeneracyError,
    InvalidArgumentError,
    SimError,
)
from .noise import NoiseParams, NoiseTrace, generate_trace, variance_from_t2star
from .observables import PumpingFit, WorkRecord, accumulate_work, fidelity, initial_state, pumping_rate
from .pauli import PauliCoeffs, eig_pauli, expm_pauli
from .propagation import (
    DDConfig,
    IntegrationConfig,
    Trajectory,
    effective_propagator_error,
    evolve_dd,
    evolve_lab,
    evolve_plain,
)
from .topology import FloquetZoneGrid, analytic_chern, chern_fhs, h_trajectory_sample, min_gap

__all__ = [
    "__version__",
    "ConfigError",
    "ContractError",
    "CriticalPointError",
    "DDConfig",
    "DegeneracyError",
    "DriveParams",
    "EnsembleResult",
    "ExperimentConfig",
    "FieldVector",
    "FloquetZoneGrid",
    "IntegrationConfig",
    "InvalidArgumentError",
    "LabFrameParams",
    "NoiseParams",
    "NoiseTrace",
    "PauliCoeffs",
    "PumpingFit",
    "SimError",
    "Trajectory",
    "WorkRecord",
    "accumulate_work",
    "analytic_chern",
    "chern_fhs",
    "effective_propagator_error",
    "eig_pauli",
    "evolve_dd",
    "evolve_lab",
    "evolve_plain",
    "expm_pauli",
    "fidelity",
    "generate_trace",
    "h_trajectory_sample",
    "initial_state",
    "min_gap",
    "pumping_rate",
    "run_ensemble",
    "sweep_correlation_time",
    "sweep_m",
    "variance_from_t2star",
]
