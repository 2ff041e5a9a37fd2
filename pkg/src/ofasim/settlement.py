"""Settlement engine: failure costs, solver payoffs, beneficiary payout.

Operations execute in descending bid order until one succeeds. An operation
that executes and reverts is charged a failure cost proportional to the gas it
reserved:

    failure_cost = (bid − successful_bid) · gas_reserved / gamma   (a later,
                   lower-bidding operation succeeded)
    failure_cost = bid · gas_reserved / gamma                      (no
                   operation succeeded)

Operations after the first success are skipped and pay nothing. The
beneficiary receives the winning bid plus all failure costs; with no winner,
the payout degrades gracefully to the gas-weighted average of the bids, whose
worst case over all outcome patterns is the guaranteed minimum

    guaranteed_minimum = Σ bid_i · gas_reserved_i / gamma.

Design notes:
  - Settlement is a pure function of (transaction, scripted behaviors); no
    hidden state, so outcome patterns can be enumerated exhaustively.
  - The beneficiary payout is computed from its own case analysis rather than
    as winner bid + collected costs, so conservation is a real cross-check.
  - Gas fees: each reverted operation pays gas_price · gas_used for itself;
    the winner pays for its own gas plus the user operations' gas. Summed
    across cases this accounts for exactly gas_price · total_gas_used.
  - All currency is exact (Fraction); every identity above holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from types import MappingProxyType
from typing import Mapping, Optional

from .auction import AuctionTransaction, Behavior
from .money import ZERO


class OpOutcome(Enum):
    """Realized execution status of an operation within a settlement."""

    SUCCEEDED = "succeeded"
    REVERTED = "reverted"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class SettlementResult:
    """Complete accounting for one settled transaction.

    Attributes:
        winner: Solver id of the succeeded operation, if any.
        executed: (solver_id, outcome) pairs in execution order.
        failure_costs: Penalties charged to reverted operations.
        solver_payoffs: Per-solver net payoff, using the transaction's
            private values (missing values default to zero).
        beneficiary_payout: Amount received by the auction beneficiary.
        total_gas_used: User gas plus gas used by executed solver operations.
        reverted_set: Solver ids of executed-and-reverted operations.
        winner_bid: Bid of the winner, if any.
        gas_charges: Gas fees paid per executing solver (the winner's charge
            includes the user operations' gas).
    """

    winner: Optional[str]
    executed: tuple[tuple[str, OpOutcome], ...]
    failure_costs: Mapping[str, Fraction]
    solver_payoffs: Mapping[str, Fraction]
    beneficiary_payout: Fraction
    total_gas_used: int
    reverted_set: tuple[str, ...]
    winner_bid: Optional[Fraction] = None
    gas_charges: Mapping[str, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "failure_costs", MappingProxyType(dict(self.failure_costs))
        )
        object.__setattr__(
            self, "solver_payoffs", MappingProxyType(dict(self.solver_payoffs))
        )
        object.__setattr__(
            self, "gas_charges", MappingProxyType(dict(self.gas_charges))
        )


def failure_cost(
    failing_bid: Fraction,
    successful_bid: Optional[Fraction],
    gas_reserved: int,
    gamma: int,
) -> Fraction:
    """Penalty for an operation that executed and reverted.

    Args:
        failing_bid: Bid of the reverted operation.
        successful_bid: Bid of the operation that later succeeded, or None if
            no operation succeeded.
        gas_reserved: Gas the reverted operation reserved.
        gamma: Solver gas budget of the transaction.

    Returns:
        ``(failing_bid − successful_bid) · gas_reserved / gamma`` when a
        success followed, else ``failing_bid · gas_reserved / gamma``.

    Raises:
        ValueError: On sequencing violations — non-positive gamma, reserved
            gas above gamma, or a successful bid above the failing bid
            (execution order forbids it).
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 0 < gas_reserved <= gamma:
        raise ValueError("gas_reserved must lie in (0, gamma]")
    if failing_bid < 0:
        raise ValueError("failing_bid must be non-negative")
    share = Fraction(gas_reserved, gamma)
    if successful_bid is None:
        return failing_bid * share
    if successful_bid > failing_bid:
        raise ValueError("successful bid exceeds failing bid (sequencing bug)")
    return (failing_bid - successful_bid) * share


def settle(tx: AuctionTransaction) -> SettlementResult:
    """Execute a transaction's operations in order and account for the result.

    Operations run in the transaction's canonical order. Each scripted revert
    is charged its failure cost plus gas fees; the first scripted success wins,
    pays its bid plus gas fees (including the user operations' gas), and every
    later operation is skipped with zero payoff.

    Args:
        tx: A valid admitted transaction.

    Returns:
        The full accounting; an empty transaction yields no winner and a zero
        payout.
    """
    gamma = tx.gamma
    price = tx.schedule.gas_price
    executed: list[tuple[str, OpOutcome]] = []
    reverted = []
    winner = None
    for op in tx.solver_ops:
        if winner is not None:
            executed.append((op.solver_id, OpOutcome.SKIPPED))
        elif op.behavior is Behavior.SUCCEED:
            winner = op
            executed.append((op.solver_id, OpOutcome.SUCCEEDED))
        else:
            reverted.append(op)
            executed.append((op.solver_id, OpOutcome.REVERTED))

    winner_bid = winner.bid if winner is not None else None
    costs = {
        op.solver_id: failure_cost(op.bid, winner_bid, op.gas_reserved, gamma)
        for op in reverted
    }

    solver_gas_used = sum(op.gas_used for op in reverted)
    if winner is not None:
        solver_gas_used += winner.gas_used
    total_gas_used = tx.schedule.user_gas_consumed + solver_gas_used

    gas_charges: dict[str, Fraction] = {
        op.solver_id: price * op.gas_used for op in reverted
    }
    if winner is not None:
        gas_charges[winner.solver_id] = price * (
            tx.schedule.user_gas_consumed + winner.gas_used
        )

    payoffs: dict[str, Fraction] = {}
    for op in tx.solver_ops:
        sid = op.solver_id
        if winner is not None and sid == winner.solver_id:
            value = tx.private_values.get(sid, ZERO)
            payoffs[sid] = value - op.bid - gas_charges[sid]
        elif sid in costs:
            payoffs[sid] = -costs[sid] - gas_charges[sid]
        else:
            payoffs[sid] = ZERO

    if winner is not None and not reverted:
        payout = winner.bid
    elif winner is not None:
        payout = winner.bid + sum(
            (op.bid - winner.bid) * Fraction(op.gas_reserved, gamma)
            for op in reverted
        )
    elif reverted:
        payout = sum(op.bid * Fraction(op.gas_reserved, gamma) for op in reverted)
    else:
        payout = ZERO

    return SettlementResult(
        winner=winner.solver_id if winner is not None else None,
        executed=tuple(executed),
        failure_costs=costs,
        solver_payoffs=payoffs,
        beneficiary_payout=payout,
        total_gas_used=total_gas_used,
        reverted_set=tuple(op.solver_id for op in reverted),
        winner_bid=winner_bid,
        gas_charges=gas_charges,
    )


def solver_payoff(
    result: SettlementResult, solver_id: str, private_value: Fraction
) -> Fraction:
    """Net payoff of one solver under a supplied private value.

    Args:
        result: A settlement.
        solver_id: Solver whose payoff to compute.
        private_value: The solver's value for winning.

    Returns:
        ``private_value − bid − gas`` if it won; ``−failure_cost − gas`` if it
        reverted; 0 if it was skipped.

    Raises:
        KeyError: If the solver did not participate in the settlement.
    """
    outcomes = dict(result.executed)
    if solver_id not in outcomes:
        raise KeyError(f"unknown solver_id: {solver_id!r}")
    outcome = outcomes[solver_id]
    if outcome is OpOutcome.SUCCEEDED:
        assert result.winner_bid is not None
        return private_value - result.winner_bid - result.gas_charges[solver_id]
    if outcome is OpOutcome.REVERTED:
        return -result.failure_costs[solver_id] - result.gas_charges[solver_id]
    return ZERO


def guaranteed_minimum(tx: AuctionTransaction) -> Fraction:
    """Worst-case beneficiary payout: the gas-weighted average of all bids.

    Equals the payout when every operation reverts, which is the minimum over
    all outcome patterns.
    """
    gamma = tx.gamma
    return sum(
        (op.bid * Fraction(op.gas_reserved, gamma) for op in tx.solver_ops),
        ZERO,
    )
