"""Helpful utilities shared by the i4mirror modules."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Union

from cachetools import LRUCache, cached

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]

FACTORIAL_CACHE: LRUCache = LRUCache(maxsize=512)  # type: ignore


def fraction_to_str(value: Rational) -> str:
    """Format an exact rational as a reduced 'p/q' string ('p' for integers)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_fraction(text: str | int | Fraction) -> Fraction:
    """Parse a 'p/q' string (or an integer) into a Fraction."""
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as error:
        raise ValueError(f"Not an exact rational number: {text!r}") from error


def parse_int_vector(text: str, length: int | None = None) -> tuple[int, ...]:
    """Parse a comma separated list of integers, e.g. '0,2,0,1'."""
    try:
        vector = tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as error:
        raise ValueError(f"Not a comma separated integer vector: {text!r}") from error
    if length is not None and len(vector) != length:
        raise ValueError(f"Expected {length} components, got {len(vector)}: {text!r}")
    return vector


def parse_complex(text: str) -> complex:
    """Parse values such as '3i', '1/2+2i' or '0.5+2j' into a complex number."""
    cleaned = text.replace(" ", "").replace("i", "j")
    if cleaned.endswith("j") and cleaned[:-1] in ("", "+", "-"):
        cleaned = cleaned[:-1] + "1j"
    # complex() does not accept fractions, split real and imaginary parts by hand.
    # A sign right after an exponent marker belongs to the exponent.
    split = max(
        (
            index
            for index, char in enumerate(cleaned)
            if char in "+-" and index > 0 and cleaned[index - 1] not in "eE"
        ),
        default=-1,
    )
    if cleaned.endswith("j") and split > 0:
        real, imag = cleaned[:split], cleaned[split:-1]
    elif cleaned.endswith("j"):
        real, imag = "0", cleaned[:-1]
    else:
        real, imag = cleaned, "0"
    try:
        return complex(float(Fraction(real)), float(Fraction(imag)))
    except (ValueError, ZeroDivisionError) as error:
        raise ValueError(f"Not a complex number: {text!r}") from error


@cached(cache=FACTORIAL_CACHE)
def factorial(n: int) -> int:
    """Return n! (memoized, the I-function asks for the same values repeatedly)."""
    return math.factorial(n)
