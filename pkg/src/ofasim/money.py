"""Exact currency arithmetic with fixed-point serialization.

All currency amounts in this package are `fractions.Fraction` values, so
settlement identities (conservation, worst-case floors) hold exactly with no
rounding anywhere in the accounting path. Amounts cross process boundaries
(JSON scenarios, CSV sweeps, reports) as decimal strings with at most
``FRACTIONAL_DIGITS`` fractional digits; quantization happens only at that
serialization boundary, never inside a computation.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction

#: Number of fractional decimal digits accepted on input and emitted on output.
FRACTIONAL_DIGITS = 18

_SCALE = 10**FRACTIONAL_DIGITS

Amount = Fraction

ZERO = Fraction(0)


def parse_amount(text: str | int) -> Fraction:
    """Parse a decimal-string (or integer) currency amount exactly.

    Args:
        text: Decimal literal such as ``"10.075"`` or ``"7.5e-7"``, or an int.

    Returns:
        The exact rational value of the literal.

    Raises:
        ValueError: If the literal is not a finite decimal number or carries
            more than ``FRACTIONAL_DIGITS`` fractional digits.
    """
    if isinstance(text, bool):
        raise ValueError("currency amount must be a decimal string, not a bool")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(
            f"currency amount must be a decimal string, got {type(text).__name__}"
        )
    try:
        value = Decimal(text)
    except InvalidOperation as exc:
        raise ValueError(f"not a decimal number: {text!r}") from exc
    if not value.is_finite():
        raise ValueError(f"currency amount must be finite: {text!r}")
    exponent = value.as_tuple().exponent
    if isinstance(exponent, int) and -exponent > FRACTIONAL_DIGITS:
        raise ValueError(
            f"more than {FRACTIONAL_DIGITS} fractional digits: {text!r}"
        )
    return Fraction(value)


def format_amount(amount: Fraction) -> str:
    """Render an amount as a decimal string with ≤ 18 fractional digits.

    Exact multiples of 10^-18 round-trip exactly; other rationals are rounded
    half-even at the 18th fractional digit. Trailing zeros are trimmed.
    """
    units = round(amount * _SCALE)
    sign = "-" if units < 0 else ""
    whole, frac = divmod(abs(units), _SCALE)
    if frac == 0:
        return f"{sign}{whole}"
    digits = str(frac).zfill(FRACTIONAL_DIGITS).rstrip("0")
    return f"{sign}{whole}.{digits}"
