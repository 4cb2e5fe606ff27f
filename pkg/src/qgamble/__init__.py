"""Simulator and min-max analyzer for the two-party quantum gambling protocol."""

from .equilibrium import (
    EquilibriumResult,
    RestrictedStrategy,
    SearchOptions,
    alice_best_response,
    bob_guarantee,
    restricted_payoff,
    sweep_R,
)
from .errors import (
    InvalidArgumentError,
    InvalidSpecError,
    InvalidStateError,
    InvalidStrategyError,
    QGambleError,
    ReductionInvalidError,
)
from .protocol import (
    AliceStrategy,
    BobStrategy,
    GameRules,
    PayoffBreakdown,
    RoundOutcome,
    Verification,
    bob_rotation,
    expected_payoff,
    initial_state,
    play_round,
    simulate,
    verification_state,
)
from .qstate import QubitState, apply_unitary, inner_product, measure_qubit, new_basis_state, project

__version__ = "0.1.0"
