"""
Input validation and parsing utilities for rational data.
"""

import re
from fractions import Fraction
from typing import Any, List, Sequence, Union

from app.utils.exceptions import DimensionMismatchError, ValidationError

RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value: Union[str, int, Fraction]) -> Fraction:
    """
    Parse a rational string "p/q" (or "p") into a Fraction.

    Args:
        value: String, int or Fraction to convert

    Returns:
        The exact rational value

    Raises:
        ValidationError: If the string is malformed or has a zero denominator
    """
    if isinstance(value, bool):
        raise ValidationError(f"Not a rational number: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if not isinstance(value, str):
        raise ValidationError(f"Rational values must be strings 'p/q', got {type(value).__name__}")

    match = RATIONAL_PATTERN.match(value)
    if not match:
        raise ValidationError(f"Malformed rational string: {value!r}")

    numerator, denominator = match.group(1), match.group(2)
    if denominator is not None and int(denominator) == 0:
        raise ValidationError(f"Zero denominator in rational string: {value!r}")
    return Fraction(int(numerator), int(denominator) if denominator else 1)


def is_rational_string(value: Any) -> bool:
    """Check whether a value is a well-formed rational string."""
    try:
        parse_rational(value)
        return isinstance(value, str)
    except ValidationError:
        return False


def format_rational(value: Any) -> str:
    """
    Render a scalar as "p/q", or "p" for integers.

    Floats are converted exactly through Fraction, so the rendering of a float
    backend value is lossless but may have a large denominator.
    """
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def validate_square_matrix(rows: Sequence[Sequence[Any]], size: int, name: str = "matrix") -> List[List[Any]]:
    """
    Validate that nested rows form a size × size matrix.

    Returns:
        The rows as lists

    Raises:
        DimensionMismatchError: On wrong shape
    """
    if len(rows) != size:
        raise DimensionMismatchError(f"{name} must have {size} rows, got {len(rows)}")
    result = []
    for i, row in enumerate(rows):
        if len(row) != size:
            raise DimensionMismatchError(f"{name} row {i} must have {size} entries, got {len(row)}")
        result.append(list(row))
    return result

