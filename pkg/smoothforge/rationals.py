#!/usr/bin/env python3
"""
Exact rationals as p/q text
"""

from fractions import Fraction
from typing import Iterable, List, Tuple, Union

from smoothforge.errors import DomainError

RationalLike = Union[Fraction, int, str]


def parse_fraction(text: RationalLike) -> Fraction:
    """'3/4', '-2' or an int; floats are refused so nothing inexact slips in"""
    if isinstance(text, float):
        raise DomainError(f"refusing inexact value {text!r}; pass p/q text")
    try:
        return Fraction(text.strip()) if isinstance(text, str) else Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"not an exact rational: {text!r}") from exc


def format_fraction(value: Fraction) -> str:
    """Always p/q, including integers (p/1)"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction_list(text: str) -> List[Fraction]:
    """Comma separated rationals"""
    return [parse_fraction(part) for part in text.split(",") if part.strip()]


def format_tuple(values: Iterable[Fraction]) -> Tuple[str, ...]:
    return tuple(format_fraction(value) for value in values)
