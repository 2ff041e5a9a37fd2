"""Censorship-cost analysis for gas-exhaustion (spoof-bid) attacks.

An attacker can try to block rival solvers by outbidding them and reserving
enough gas that no rival operation fits the budget, then letting its own
operation revert. Two cost models:

  - Naive: blocking costs the gas burned, ``gas_price · gamma``. Censorship
    is rational whenever the attacker's private value exceeds that.
  - Refined: with failure costs, blocking all rivals requires outbidding the
    best rival bid B and reserving at least ``gamma' = gamma − min rival
    gas``, so the attack costs at least ``gamma' · (gas_price + B/gamma)``.
    The signed surplus

        resistance = gamma' · (gas_price + B / gamma) − attacker_value

    is positive exactly when censorship is unprofitable. The attacker's own
    operation is excluded from the rival min/max.

Resistance is strictly increasing in gamma (d/dgamma = gas_price +
B·min_gas/gamma² > 0 whenever gas is priced or rivals bid), which is the
qualitative story the sweep output shows. All arithmetic is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .money import ZERO


@dataclass(frozen=True)
class CensorshipScenario:
    """One censorship configuration.

    Attributes:
        gamma: Solver gas budget of the targeted auction.
        gas_price: Currency per gas unit.
        rival_ops: (bid, gas_reserved) pairs of the rivals the attacker wants
            to block; must be non-empty for the refined metric.
        attacker_value: The attacker's private value for a censored auction.
    """

    gamma: int
    gas_price: Fraction
    rival_ops: tuple[tuple[Fraction, int], ...]
    attacker_value: Fraction = ZERO

    def __post_init__(self) -> None:
        if not isinstance(self.gamma, int) or self.gamma <= 0:
            raise ValueError("gamma must be a positive integer")
        if self.gas_price < 0:
            raise ValueError("gas_price must be non-negative")
        object.__setattr__(self, "rival_ops", tuple(tuple(r) for r in self.rival_ops))
        for bid, gas in self.rival_ops:
            if bid < 0:
                raise ValueError("rival bids must be non-negative")
            if not 0 < gas <= self.gamma:
                raise ValueError("rival gas must lie in (0, gamma]")


def naive_censorship_cost(gamma: int, gas_price: Fraction) -> Fraction:
    """Cost of blocking the auction when only gas is at stake.

    Args:
        gamma: Solver gas budget.
        gas_price: Currency per gas unit.

    Returns:
        ``gas_price · gamma``; censorship is rational when the attacker's
        value exceeds this.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    return gas_price * gamma


def censorship_resistance(scenario: CensorshipScenario) -> Fraction:
    """Signed surplus that makes censorship unprofitable under failure costs.

    Args:
        scenario: The configuration to evaluate.

    Returns:
        ``gamma' · (gas_price + B/gamma) − attacker_value`` with
        ``gamma' = gamma − min rival gas`` and ``B = max rival bid``.
        Positive values mean censorship loses money.

    Raises:
        ValueError: If the rival set is empty.
    """
    if not scenario.rival_ops:
        raise ValueError("refined resistance needs at least one rival")
    min_gas = min(gas for _, gas in scenario.rival_ops)
    best_bid = max(bid for bid, _ in scenario.rival_ops)
    gamma_prime = scenario.gamma - min_gas
    rate = scenario.gas_price + best_bid / Fraction(scenario.gamma)
    return gamma_prime * rate - scenario.attacker_value


def resistance_sweep(
    gamma_range: Sequence[int] | Iterable[int],
    gas_price_range: Sequence[Fraction] | Iterable[Fraction],
    template: CensorshipScenario,
) -> list[tuple[int, Fraction, Fraction]]:
    """Evaluate resistance over a (gamma, gas_price) grid with fixed rivals.

    Args:
        gamma_range: Gas budgets to sweep (each must cover the rivals' gas).
        gas_price_range: Gas prices to sweep.
        template: Scenario supplying rivals and attacker value.

    Returns:
        ``(gamma, gas_price, resistance)`` rows, gamma-major; along each
        gas-price row the resistance is non-decreasing in gamma.

    Raises:
        ValueError: If either range is empty.
    """
    gammas = list(gamma_range)
    prices = list(gas_price_range)
    if not gammas or not prices:
        raise ValueError("sweep ranges must be non-empty")
    rows = []
    for gamma in gammas:
        for price in prices:
            scenario = CensorshipScenario(
                gamma=gamma,
                gas_price=price,
                rival_ops=template.rival_ops,
                attacker_value=template.attacker_value,
            )
            rows.append((gamma, price, censorship_resistance(scenario)))
    return rows
