"""Exact second-quantization engine on small momentum mode sets."""

from .basis import EmptySector, FockBasis, popcount
from .bogoliubov import (
    BogoliubovTransform,
    CutoffPair,
    DuhamelResult,
    ModeSetTooSmall,
    approx_ground_state_check,
    bogoliubov_T,
    build_B,
    duhamel_check,
    ground_state,
    pair_count,
    propagation_profile,
    pseudo_boson,
    pseudo_boson_operator,
    regularized_Q4,
    smoothstep,
)
from .hamiltonian import HamiltonianTerms, build_hamiltonian, hamiltonian_terms
from .modes import DOWN, UP, ModeSet
from .operators import (
    FermionOperator,
    OutOfBasis,
    SparseOperator,
    annihilation,
    creation,
    identity,
    ladder,
    momentum_operator,
    number_operator,
)
from .serialize import dumps_operator, dumps_state, loads_operator, loads_state
from .transform import Decomposition, decompose, excitation_blocks, particle_hole_R, ph_substitute, verify_conjugation

__all__ = [
    "BogoliubovTransform",
    "CutoffPair",
    "Decomposition",
    "DuhamelResult",
    "DOWN",
    "EmptySector",
    "FermionOperator",
    "FockBasis",
    "HamiltonianTerms",
    "ModeSet",
    "ModeSetTooSmall",
    "OutOfBasis",
    "SparseOperator",
    "UP",
    "annihilation",
    "approx_ground_state_check",
    "bogoliubov_T",
    "build_B",
    "build_hamiltonian",
    "creation",
    "decompose",
    "dumps_operator",
    "dumps_state",
    "duhamel_check",
    "excitation_blocks",
    "ground_state",
    "hamiltonian_terms",
    "identity",
    "ladder",
    "loads_operator",
    "loads_state",
    "momentum_operator",
    "number_operator",
    "pair_count",
    "particle_hole_R",
    "ph_substitute",
    "popcount",
    "propagation_profile",
    "pseudo_boson",
    "pseudo_boson_operator",
    "regularized_Q4",
    "smoothstep",
    "verify_conjugation",
]
