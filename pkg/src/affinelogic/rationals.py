"""Exact rational parsing/formatting shared across the package.

Every number in this package is a fractions.Fraction; serialized form is
always the bit-exact string "p/q".
"""

from __future__ import annotations

from fractions import Fraction


def parse_rational(text: str) -> Fraction:
    """Parse 'p/q' (or a plain integer string) into a Fraction."""
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"malformed rational {text!r}: {exc}") from None


def format_rational(value: Fraction) -> str:
    """Serialize a Fraction as 'p/q', denominator always present."""
    return f"{value.numerator}/{value.denominator}"
