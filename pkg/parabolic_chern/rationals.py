"""Exact rational parsing and rendering.

Scenario files carry rationals as integers or "p/q" strings. Floats are refused
everywhere so that no rounding can enter a computation.
"""

import re
from fractions import Fraction
from typing import Any

from .errors import ScenarioParseError

_RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def to_fraction(value: Any, where: str = "value") -> Fraction:
    """Convert an integer, Fraction or "p/q" string to a Fraction.

    Args:
        value: Raw value from a scenario file or caller
        where: Location used in the error message

    Returns:
        Exact Fraction

    Raises:
        ScenarioParseError: If the value is a float, a bool or malformed
    """
    if isinstance(value, bool):
        raise ScenarioParseError(f"{where}: booleans are not rationals ({value!r})")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ScenarioParseError(f"{where}: floating point value {value!r} rejected, use \"p/q\"")
    if isinstance(value, str):
        match = _RATIONAL_PATTERN.match(value)
        if not match:
            raise ScenarioParseError(f"{where}: cannot parse rational {value!r}")
        numerator = int(match.group(1))
        denominator = int(match.group(2)) if match.group(2) is not None else 1
        if denominator == 0:
            raise ScenarioParseError(f"{where}: zero denominator in {value!r}")
        return Fraction(numerator, denominator)
    raise ScenarioParseError(f"{where}: expected integer or \"p/q\" string, got {type(value).__name__}")


def to_integer(value: Any, where: str = "value") -> int:
    """Convert a value to an integer, accepting integral rationals.

    Raises:
        ScenarioParseError: If the value is not an exact integer
    """
    fraction = to_fraction(value, where)
    if fraction.denominator != 1:
        raise ScenarioParseError(f"{where}: expected an integer, got {fraction}")
    return int(fraction)

