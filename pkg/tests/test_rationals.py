"""Tests for exact rational parsing."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis.strategies import fractions

from parabolic_chern.errors import ScenarioParseError
from parabolic_chern.rationals import to_fraction, to_integer


class TestToFraction:
    """Test parsing of rational literals."""

    @pytest.mark.parametrize("raw, expected", [
        (3, Fraction(3)),
        (-2, Fraction(-2)),
        ("1/4", Fraction(1, 4)),
        ("-3/4", Fraction(-3, 4)),
        (" 6/8 ", Fraction(3, 4)),
        ("+5", Fraction(5)),
        (Fraction(7, 3), Fraction(7, 3)),
    ])
    def test_accepts_exact_literals(self, raw, expected):
        """Integers, p/q strings and Fractions parse exactly."""
        assert to_fraction(raw) == expected

    @pytest.mark.parametrize("raw", [0.25, 1.0, True, "1/0", "0.5", "abc", "1/-2", None, [1]])
    def test_rejects_inexact_or_malformed(self, raw):
        """Floats, booleans and malformed strings raise ScenarioParseError."""
        with pytest.raises(ScenarioParseError):
            to_fraction(raw)

    def test_error_names_location(self):
        """The error message carries the location."""
        with pytest.raises(ScenarioParseError, match="bundle.ch2"):
            to_fraction(0.5, "bundle.ch2")

    @given(fractions())
    def test_format_then_parse_is_identity(self, value):
        """Rendering and parsing a rational is exact."""
        assert to_fraction(str(value)) == value


class TestToInteger:
    """Test integer parsing."""

    def test_integral_rational_is_accepted(self):
        """"4/2" is the integer 2."""
        assert to_integer("4/2") == 2

    def test_proper_fraction_is_rejected(self):
        """A non-integral rational is refused."""
        with pytest.raises(ScenarioParseError, match="expected an integer"):
            to_integer("1/2")

