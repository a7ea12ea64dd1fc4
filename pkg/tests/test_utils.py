from fractions import Fraction

import pytest

from i4mirror.utils import (
    factorial,
    fraction_to_str,
    parse_complex,
    parse_fraction,
    parse_int_vector,
)


@pytest.mark.parametrize(
    "value,text",
    [
        (Fraction(-9, 4), "-9/4"),
        (Fraction(6, 3), "2"),
        (0, "0"),
        (Fraction(1, 3), "1/3"),
    ],
)
def test_fraction_to_str(value, text):
    assert fraction_to_str(value) == text


def test_parse_fraction():
    assert parse_fraction("-9/4") == Fraction(-9, 4)
    assert parse_fraction(12) == 12
    with pytest.raises(ValueError):
        parse_fraction("1/0")
    with pytest.raises(ValueError):
        parse_fraction("one")


def test_parse_int_vector():
    assert parse_int_vector("0,2,0,1", length=4) == (0, 2, 0, 1)
    assert parse_int_vector("3, -1") == (3, -1)
    with pytest.raises(ValueError):
        parse_int_vector("0,2,0", length=4)
    with pytest.raises(ValueError):
        parse_int_vector("a,b")


@pytest.mark.parametrize(
    "text,value",
    [
        ("3i", 3j),
        ("i", 1j),
        ("-2i", -2j),
        ("1/2+2i", 0.5 + 2j),
        ("0.5-1.5j", 0.5 - 1.5j),
        ("2", 2 + 0j),
        ("1e-3+2i", 0.001 + 2j),
        ("1/2-2E-1i", 0.5 - 0.2j),
        ("2e-3i", 0.002j),
    ],
)
def test_parse_complex(text, value):
    assert parse_complex(text) == value


def test_parse_complex_rejects_garbage():
    with pytest.raises(ValueError):
        parse_complex("abc")
    with pytest.raises(ValueError):
        parse_complex("1/0+2i")


def test_factorial():
    assert [factorial(n) for n in range(6)] == [1, 1, 2, 6, 24, 120]
