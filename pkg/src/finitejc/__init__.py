"""Finite two-mode Jaynes-Cummings model on su(2) oscillators.

Two finite oscillators (each a (2j+1)-level su(2) system) couple to a
two-level atom under a rotating-wave interaction.  The package builds
the algebra and Hamiltonians, propagates states three independent ways
(sector-exact exponentials, the reduced amplitude ODE system, and
closed forms), and provides observables plus a small CLI.
"""

from .states import (
    CoupledState,
    ModelParams,
    SectorBasis,
    alpha_for_mean_n,
    basis_state,
    coherent_coefficients,
    coherent_mean_n,
    coherent_state,
    energy_mode_state,
    flat_index,
    product_state,
    sector_basis,
    sector_decomposition,
    truncated_poisson_coefficients,
)
from .su2 import (
    BosonRep,
    SpinRep,
    build_boson_rep,
    build_spin_rep,
    contracted_ladders,
    kravchuk_rotation,
    oscillator_observables,
)
from .hamiltonians import (
    HamiltonianSet,
    ModeModel,
    RotatedFrame,
    beam_splitter_frame,
    bosonic_mode_model,
    build_bosonic_hamiltonian,
    build_excitation_operator,
    build_finite_hamiltonian,
    dressed_states,
    elimination_angle,
    finite_mode_model,
    sector_block,
    sector_matrix,
)
from .dynamics import (
    DETUNING_MODES,
    PROPAGATION_METHODS,
    AmplitudeTriple,
    IntegrationError,
    PropagationSpec,
    ReducedState,
    ResonantSolution,
    Trajectory,
    characteristic_triple_solution,
    coupling_element,
    detuning,
    integrate_triple,
    interaction_frame_check,
    nonresonant_characteristic_roots,
    propagate_exact,
    propagate_exact_model,
    propagate_reduced,
    reduced_rhs,
    resonant_closed_form,
)
from .observables import (
    ExpectationRecord,
    atomic_inversion,
    bare_rabi_period,
    first_revival_time,
    inversion_envelope,
    mode_distribution,
    mode_number_expectation,
    trajectory_expectations,
)
from .config import ConfigError, InitialStateSpec, RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "AmplitudeTriple",
    "ConfigError",
    "CoupledState",
    "DETUNING_MODES",
    "ExpectationRecord",
    "HamiltonianSet",
    "InitialStateSpec",
    "IntegrationError",
    "ModeModel",
    "ModelParams",
    "PROPAGATION_METHODS",
    "PropagationSpec",
    "ReducedState",
    "ResonantSolution",
    "RotatedFrame",
    "RunConfig",
    "SectorBasis",
    "SpinRep",
    "Trajectory",
    "alpha_for_mean_n",
    "atomic_inversion",
    "bare_rabi_period",
    "basis_state",
    "beam_splitter_frame",
    "bosonic_mode_model",
    "BosonRep",
    "build_boson_rep",
    "build_bosonic_hamiltonian",
    "build_excitation_operator",
    "build_finite_hamiltonian",
    "build_spin_rep",
    "characteristic_triple_solution",
    "coherent_coefficients",
    "coherent_mean_n",
    "coherent_state",
    "contracted_ladders",
    "coupling_element",
    "detuning",
    "dressed_states",
    "elimination_angle",
    "energy_mode_state",
    "finite_mode_model",
    "first_revival_time",
    "flat_index",
    "integrate_triple",
    "interaction_frame_check",
    "inversion_envelope",
    "kravchuk_rotation",
    "load_config",
    "mode_distribution",
    "mode_number_expectation",
    "nonresonant_characteristic_roots",
    "oscillator_observables",
    "product_state",
    "propagate_exact",
    "propagate_exact_model",
    "propagate_reduced",
    "reduced_rhs",
    "resonant_closed_form",
    "sector_basis",
    "sector_block",
    "sector_decomposition",
    "sector_matrix",
    "trajectory_expectations",
    "truncated_poisson_coefficients",
]
