"""Escrow ledger with in-flight reservation accounting.

Solvers maintain escrow balances with each auctioneer. Before including an
operation in an auction, the auctioneer reserves the operation's worst-case
cost against the solver's balance:

    required_escrow = bid · gas_reserved / gamma + gas_price · gas_reserved

(the maximum possible failure cost plus the gas prepayment). Reservations are
all-or-nothing: an operation whose requirement exceeds the available balance
(balance minus already-pending reservations) is rejected and the ledger is
left untouched. Once the execution outcome is known, the reservation settles
against the actual charge — which never exceeds the reserved amount — and any
remainder returns to the available balance immediately.

Invariants maintained:
  - available(solver, auctioneer) ≥ 0 at all times;
  - balance ≥ Σ pending reservation amounts (the escrow inequality);
  - total charges applied against a solver never exceed what it deposited.

The ledger is a serialized-access component: mutating operations take a single
internal lock (linearizable). Snapshots are plain immutable mappings that can
be cached for an entire auction without further ledger reads.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Iterator, Mapping

from .auction import SolverOperation
from .money import ZERO, format_amount, parse_amount


class InsufficientEscrow(Exception):
    """Reservation rejected: available balance below the required escrow.

    Signals that the auctioneer must exclude this bid from the array.
    """


def required_escrow(
    bid: Fraction, gas_reserved: int, gamma: int, gas_price: Fraction
) -> Fraction:
    """Worst-case penalty plus gas prepayment for one operation.

    Args:
        bid: The operation's bid.
        gas_reserved: Gas reserved for the operation.
        gamma: Solver gas budget of the auction.
        gas_price: Currency per gas unit.

    Returns:
        ``bid · gas_reserved / gamma + gas_price · gas_reserved``.

    Raises:
        ValueError: If gamma is not positive or gas_reserved exceeds gamma.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    if not 0 < gas_reserved <= gamma:
        raise ValueError("gas_reserved must lie in (0, gamma]")
    return bid * Fraction(gas_reserved, gamma) + gas_price * gas_reserved


@dataclass(frozen=True)
class PendingReservation:
    """An in-flight reservation for one unsettled operation.

    Attributes:
        handle: Unique reservation identifier within the ledger.
        solver_id: Solver whose balance is encumbered.
        auctioneer_id: Auctioneer holding the escrow relationship.
        op_ref: Identity of the reserved operation (its solver id).
        amount: Reserved amount (the operation's required escrow).
    """

    handle: int
    solver_id: str
    auctioneer_id: str
    op_ref: str
    amount: Fraction


class EscrowLedger:
    """Per-(solver, auctioneer) balances with pending reservations."""

    def __init__(self) -> None:
        self._lock = threading.RLock()
        self._balances: dict[tuple[str, str], Fraction] = {}
        self._pending: dict[int, PendingReservation] = {}
        self._handles = itertools.count(1)

    def deposit(self, solver_id: str, auctioneer_id: str, amount: Fraction) -> None:
        """Credit a solver's escrow balance with an auctioneer."""
        if amount < 0:
            raise ValueError("deposit amount must be non-negative")
        with self._lock:
            key = (solver_id, auctioneer_id)
            self._balances[key] = self._balances.get(key, ZERO) + amount

    def balance(self, solver_id: str, auctioneer_id: str) -> Fraction:
        """Deposited balance, ignoring pending reservations."""
        with self._lock:
            return self._balances.get((solver_id, auctioneer_id), ZERO)

    def available(self, solver_id: str, auctioneer_id: str) -> Fraction:
        """Balance minus the sum of pending reservation amounts."""
        with self._lock:
            key = (solver_id, auctioneer_id)
            held = sum(
                (
                    r.amount
                    for r in self._pending.values()
                    if (r.solver_id, r.auctioneer_id) == key
                ),
                ZERO,
            )
            return self._balances.get(key, ZERO) - held

    def pending(self, solver_id: str, auctioneer_id: str) -> tuple[PendingReservation, ...]:
        """Pending reservations for one (solver, auctioneer) pair."""
        with self._lock:
            return tuple(
                r
                for r in self._pending.values()
                if (r.solver_id, r.auctioneer_id) == (solver_id, auctioneer_id)
            )

    def reserve(
        self,
        solver_id: str,
        auctioneer_id: str,
        op: SolverOperation,
        gamma: int,
        gas_price: Fraction,
    ) -> PendingReservation:
        """Atomically reserve an operation's worst-case cost.

        Args:
            solver_id: Solver owning the operation.
            auctioneer_id: Auctioneer running the auction.
            op: The operation to reserve for.
            gamma: Solver gas budget of the auction.
            gas_price: Currency per gas unit.

        Returns:
            The pending reservation (its ``handle`` settles or cancels it).

        Raises:
            InsufficientEscrow: If available balance is below the required
                escrow; the ledger is left unchanged.
        """
        needed = required_escrow(op.bid, op.gas_reserved, gamma, gas_price)
        with self._lock:
            if self.available(solver_id, auctioneer_id) < needed:
                raise InsufficientEscrow(
                    f"solver {solver_id!r} needs {format_amount(needed)} escrow "
                    f"with {auctioneer_id!r} but has "
                    f"{format_amount(self.available(solver_id, auctioneer_id))} available"
                )
            reservation = PendingReservation(
                handle=next(self._handles),
                solver_id=solver_id,
                auctioneer_id=auctioneer_id,
                op_ref=op.solver_id,
                amount=needed,
            )
            self._pending[reservation.handle] = reservation
            return reservation

    def settle_reservation(self, handle: int, charged: Fraction) -> None:
        """Release a reservation and deduct the actual charge.

        Args:
            handle: A pending reservation's handle.
            charged: Failure cost plus gas actually paid for the operation.

        Raises:
            KeyError: If the handle is not pending.
            ValueError: If the charge is negative or exceeds the reserved
                amount (a settlement-engine bug).
        """
        if charged < 0:
            raise ValueError("charge must be non-negative")
        with self._lock:
            reservation = self._pending.get(handle)
            if reservation is None:
                raise KeyError(f"no pending reservation with handle {handle}")
            if charged > reservation.amount:
                raise ValueError(
                    f"charge {format_amount(charged)} exceeds reserved "
                    f"{format_amount(reservation.amount)} (settlement-engine bug)"
                )
            del self._pending[handle]
            key = (reservation.solver_id, reservation.auctioneer_id)
            self._balances[key] = self._balances.get(key, ZERO) - charged

    def cancel_reservation(self, handle: int) -> None:
        """Release a stale reservation without charging anything.

        Auctioneer-side escape hatch for operations that were reserved but
        never included in a settled transaction.

        Raises:
            KeyError: If the handle is not pending.
        """
        with self._lock:
            if handle not in self._pending:
                raise KeyError(f"no pending reservation with handle {handle}")
            del self._pending[handle]

    def prefetch_snapshot(self, auctioneer_id: str) -> Mapping[str, Fraction]:
        """Immutable solver → available-balance view for one auctioneer.

        The snapshot is detached from the ledger: it can back an entire
        auction (admission solvency checks, guarantee computation) without
        further ledger reads.
        """
        with self._lock:
            view = {
                solver: self.available(solver, auctioneer)
                for (solver, auctioneer) in self._balances
                if auctioneer == auctioneer_id
            }
        return MappingProxyType(view)

    def to_json(self) -> str:
        """Export balances as a solver → auctioneer → amount JSON document."""
        with self._lock:
            nested: dict[str, dict[str, str]] = {}
            for (solver, auctioneer), amount in sorted(self._balances.items()):
                nested.setdefault(solver, {})[auctioneer] = format_amount(amount)
        return json.dumps(nested, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, document: str) -> "EscrowLedger":
        """Import a ledger from the nested-map JSON document format."""
        data = json.loads(document)
        if not isinstance(data, dict):
            raise ValueError("escrow document must be an object")
        ledger = cls()
        for solver, per_auctioneer in data.items():
            if not isinstance(per_auctioneer, dict):
                raise ValueError(f"balances for solver {solver!r} must be an object")
            for auctioneer, amount in per_auctioneer.items():
                ledger.deposit(solver, auctioneer, parse_amount(amount))
        return ledger

    def __iter__(self) -> Iterator[tuple[tuple[str, str], Fraction]]:
        with self._lock:
            return iter(sorted(self._balances.items()))
