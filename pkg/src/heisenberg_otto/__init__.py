"""Quantum Otto engine with a coupled Heisenberg spin pair as working medium.

Internal friction appears when the field on one spin is driven at a finite
rate: the eigenbasis of H(t) rotates, coherences build up, the energy
entropy grows and the extracted work drops below its adiabatic value.
"""

from .dynamics import (
    DegenerateBlockError,
    DriftExceededError,
    EvolutionResult,
    FieldProtocol,
    evolve,
    field_at,
    heat_rate_check,
    instantaneous_power,
    mixing_angle,
)
from .otto_cycle import (
    CycleConfig,
    CycleReport,
    adiabatic_work_bound,
    entropy_production,
    run_constant_delta_b_cycle,
    run_cycle,
    sudden_work_bound,
    sweep_tau,
    work_from_populations,
)
from .spin_system import (
    InvalidParameterError,
    SpinPairParams,
    build_hamiltonian,
    commutator_norm,
    spectral_decomposition,
)
from .thermal import energy_entropy, gibbs_state, project_populations, von_neumann_entropy

__version__ = "0.1.0"
