"""Conditional states of gauge-invariant free fermionic states.

Closed-form conditional symbols, their two-sided bounds, the free
completely positive model of the conditional set, and a dense Fock-space
oracle that checks every formula independently.
"""

from .conditioning import (
    ConditionalBounds,
    ExponentialConditioner,
    Membership,
    conditional_bounds,
    conditional_symbol,
    conditioner_for_target,
    exponential_conditioner,
    membership,
    oracle_conditional_symbol,
)
from .cp_maps import FreeCPMap, minimal_model, model_equivalence_check, pullback_symbol, validate_cp_map
from .free_states import FreeState, Monomial, exp_expectation, factorize, two_point, wick_expectation
from .symbols import (
    DEFAULT_TOL,
    BlockSymbol,
    Symbol,
    Tolerances,
    assemble,
    kernel_decomposition,
    modular_hamiltonian,
    positivity_witnesses,
    random_block_symbol,
    restated_positivity_check,
    trim,
    validate_symbol,
)

__version__ = "0.1.0"
