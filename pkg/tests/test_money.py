"""Tests for exact currency parsing and fixed-point formatting."""

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ofasim.money import FRACTIONAL_DIGITS, ZERO, format_amount, parse_amount


class TestParseAmount:
    def test_plain_decimal(self):
        assert parse_amount("10.075") == Fraction(403, 40)

    def test_integer_string(self):
        assert parse_amount("100") == Fraction(100)

    def test_int_passthrough(self):
        assert parse_amount(25) == Fraction(25)

    def test_negative(self):
        assert parse_amount("-0.25") == Fraction(-1, 4)

    def test_scientific_notation(self):
        assert parse_amount("7.5e-7") == Fraction(3, 4_000_000)

    def test_eighteen_fractional_digits_ok(self):
        text = "0." + "1" * FRACTIONAL_DIGITS
        assert parse_amount(text) == Fraction(int("1" * 18), 10**18)

    def test_nineteen_fractional_digits_rejected(self):
        with pytest.raises(ValueError, match="fractional digits"):
            parse_amount("0." + "1" * (FRACTIONAL_DIGITS + 1))

    def test_float_rejected(self):
        with pytest.raises(ValueError, match="decimal string, got float"):
            parse_amount(1.5)  # type: ignore[arg-type]

    def test_bool_rejected(self):
        with pytest.raises(ValueError, match="not a bool"):
            parse_amount(True)  # type: ignore[arg-type]

    def test_nan_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            parse_amount("NaN")

    def test_infinity_rejected(self):
        with pytest.raises(ValueError, match="finite"):
            parse_amount("Infinity")

    def test_garbage_rejected(self):
        with pytest.raises(ValueError, match="not a decimal number"):
            parse_amount("12,5")


class TestFormatAmount:
    def test_trims_trailing_zeros(self):
        assert format_amount(Fraction(3, 2)) == "1.5"

    def test_whole_number_has_no_point(self):
        assert format_amount(Fraction(100)) == "100"

    def test_zero(self):
        assert format_amount(ZERO) == "0"

    def test_negative(self):
        assert format_amount(Fraction(-403, 40)) == "-10.075"

    def test_rounds_repeating_decimal(self):
        assert format_amount(Fraction(2, 3)) == "0." + "6" * 17 + "7"

    def test_half_even_rounds_down_to_even(self):
        # exactly 0.5 ulp above zero rounds to the even neighbour (zero)
        assert format_amount(Fraction(1, 2 * 10**18)) == "0"

    def test_half_even_rounds_up_to_even(self):
        assert (
            format_amount(Fraction(3, 2 * 10**18))
            == "0." + "0" * 17 + "2"
        )

    @given(
        st.fractions(
            min_value=Fraction(-(10**6)),
            max_value=Fraction(10**6),
            max_denominator=10**9,
        )
    )
    def test_round_trip_is_quantization(self, amount):
        quantized = Fraction(round(amount * 10**18), 10**18)
        assert parse_amount(format_amount(amount)) == quantized

    @given(st.integers(-(10**24), 10**24))
    def test_fixed_point_units_round_trip_exactly(self, units):
        amount = Fraction(units, 10**18)
        assert parse_amount(format_amount(amount)) == amount
