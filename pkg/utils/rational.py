"""
Exact rational helpers shared by the schemas and the CLI
"""

from fractions import Fraction
from typing import Annotated, Union

from pydantic import BeforeValidator, PlainSerializer


def parse_rational(value: Union[str, int, float, Fraction]) -> Fraction:
    """Parse "p/q", an integer, or a decimal string into an exact Fraction"""

    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        # Floats come from config files like "delta: 0.1"; take the decimal reading
        return Fraction(str(value))
    text = str(value).strip()
    if not text:
        raise ValueError("empty rational")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError(f"not a rational number: {value!r}") from e


def format_rational(value: Fraction) -> str:
    """Render as "p/q" (integers keep the "/1" so files stay uniform)"""
    return f"{value.numerator}/{value.denominator}"


def floor_mul(n: int, value: Fraction) -> int:
    """Exact floor(n * value)"""
    return (n * value.numerator) // value.denominator


def ceil_fraction(value: Fraction) -> int:
    return -((-value.numerator) // value.denominator)


# pydantic field type: accepts "p/q" on input, dumps back to "p/q"
Rational = Annotated[
    Fraction,
    BeforeValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
]
