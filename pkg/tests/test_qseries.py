import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from i4mirror.exceptions import LatticeMismatchError, SeriesDomainError, TruncationError
from i4mirror.qseries import (
    CHOW_BASIS,
    ChowElement,
    ExponentLattice,
    HbarLaurent,
    QSeries,
    chow_exp,
    chow_mul,
    exp_bound_certify,
    invert_substitution,
    series_exp,
    series_inverse,
    series_log,
    series_mul,
    series_pow,
    series_substitute,
    toolkit_bound,
)

X = ExponentLattice.uniform("x")
XY = ExponentLattice.uniform("x", "y")
TRUNCATION = 4

def series(lattice, terms, truncation=TRUNCATION):
    return QSeries(lattice, terms, truncation)

coefficients = st.fractions(min_value=-5, max_value=5, max_denominator=3)
exponents = st.tuples(st.integers(0, 3), st.integers(0, 3))

any_series = st.dictionaries(exponents, coefficients, max_size=6).map(
    lambda terms: series(XY, terms)
)
positive_series = st.dictionaries(
    exponents.filter(lambda e: sum(e) > 0), coefficients, max_size=6
).map(lambda terms: series(XY, terms))
unit_series = positive_series.map(lambda a: 1 + a)

chow_elements = st.dictionaries(st.sampled_from(CHOW_BASIS), coefficients, max_size=5).map(
    ChowElement
)
nilpotent_elements = st.dictionaries(
    st.sampled_from(CHOW_BASIS[1:]), coefficients, max_size=5
).map(ChowElement)

def test_lattice_validation():
    with pytest.raises(ValueError):
        ExponentLattice(("x",), (1, 2))
    with pytest.raises(ValueError):
        ExponentLattice(("x",), (-1,))
    assert XY.grade((2, 3)) == 5
    assert XY.unit("y") == (0, 1)

def test_truncation_and_zero_terms():
    value = series(X, {(1,): 2, (2,): 0, (5,): 1})
    assert len(value) == 1
    assert value.coefficient((1,)) == 2
    assert value.coefficient((5,)) == 0
    with pytest.raises(TruncationError):
        QSeries(X, {}, -1)

def test_equality_up_to_common_truncation():
    long = series(X, {(1,): 1, (3,): 7}, 3)
    short = series(X, {(1,): 1}, 2)
    assert long == short
    assert long != series(X, {(1,): 1}, 3)

def test_lattice_mismatch():
    with pytest.raises(LatticeMismatchError):
        series(X, {(1,): 1}) + series(XY, {(1, 0): 1})
    with pytest.raises(LatticeMismatchError):
        series(X, {(1, 0): 1})

def test_binomial_square():
    one_plus_x = series(X, {(0,): 1, (1,): 1})
    assert one_plus_x * one_plus_x == series(X, {(0,): 1, (1,): 2, (2,): 1})
    assert series_pow(one_plus_x, 3).coefficient((2,)) == 3

def test_exp_and_log():
    x = series(X, {(1,): 1}, 6)
    exp_x = series_exp(x)
    assert exp_x.coefficient((3,)) == Fraction(1, 6)
    assert series_log(exp_x) == x
    with pytest.raises(SeriesDomainError):
        series_exp(series(X, {(0,): 1}))
    with pytest.raises(SeriesDomainError):
        series_log(series(X, {(0,): 2}))

def test_geometric_inverse():
    one_minus_x = series(X, {(0,): 1, (1,): -1}, 6)
    inverse = series_inverse(one_minus_x)
    assert inverse == series(X, {(n,): 1 for n in range(7)}, 6)
    with pytest.raises(SeriesDomainError):
        series_inverse(series(X, {(1,): 1}))

def test_negative_power_needs_unit():
    with pytest.raises(SeriesDomainError):
        series_pow(series(X, {(1,): 1}), -1)
    assert series_pow(series(X, {(0,): 2}), -2) == series(X, {(0,): Fraction(1, 4)})

def test_substitution():
    x = series(X, {(1,): 1})
    assert series_substitute(x, [series(X, {(0,): 1, (1,): 1})]) == series(
        X, {(1,): 1, (2,): 1}
    )
    with pytest.raises(SeriesDomainError):
        series_substitute(x, [series(X, {(1,): 1})])

def test_invert_substitution():
    x = series(X, {(1,): 1}, 6)
    g = series(X, {(0,): 1, (1,): 1, (2,): 3}, 6)
    (h,) = invert_substitution([g])
    assert series_substitute(series_mul(x, g), [h]) == x

def test_negative_grades_lower_product_truncation():
    left = QSeries(XY, {(-1, 0): 1}, 3)
    right = QSeries(XY, {(2, 0): 1}, 3)
    assert series_mul(left, right).truncation == 2

@given(any_series, any_series, any_series)
@settings(max_examples=100, deadline=None)
def test_ring_axioms(a, b, c):
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == QSeries.zero(XY, TRUNCATION)

@given(positive_series)
@settings(max_examples=100, deadline=None)
def test_exp_log_round_trip(a):
    assert series_log(series_exp(a)) == a
    assert series_exp(series_log(1 + a)) == 1 + a

@given(positive_series)
@settings(max_examples=100, deadline=None)
def test_inverse_round_trip(a):
    unit = 2 + a
    assert unit * series_inverse(unit) == QSeries.one(XY, TRUNCATION)

@given(positive_series, positive_series)
@settings(max_examples=100, deadline=None)
def test_exp_turns_sums_into_products(a, b):
    assert series_exp(a + b) == series_exp(a) * series_exp(b)

@given(any_series, unit_series, unit_series, unit_series, unit_series)
@settings(max_examples=100, deadline=None)
def test_substitutions_compose(a, f1, f2, g1, g2):
    f, g = [f1, f2], [g1, g2]
    composed = [g_i * series_substitute(f_i, g) for f_i, g_i in zip(f, g)]
    assert series_substitute(series_substitute(a, f), g) == series_substitute(a, composed)

@given(unit_series, unit_series)
@settings(max_examples=100, deadline=None)
def test_invert_substitution_round_trip(g1, g2):
    multipliers = [g1, g2]
    inverse = invert_substitution(multipliers)
    one = QSeries.one(XY, TRUNCATION)
    for g_i, h_i in zip(multipliers, inverse):
        assert h_i * series_substitute(g_i, inverse) == one
        assert g_i * series_substitute(h_i, multipliers) == one

@given(any_series, st.integers(0, TRUNCATION))
@settings(max_examples=100, deadline=None)
def test_truncation_coherence(a, order):
    b = a.truncate(order)
    assert b.truncation == order
    assert all(XY.grade(e) <= order for e, _ in b.items())
    assert (a * a).truncate(order) == b * b

def _certified(a, r):
    c = max(
        (abs(value) / Fraction(r) ** sum(e + 1 for e in exponent) for exponent, value in a.items()),
        default=Fraction(0),
    )
    return c, Fraction(r)

@given(any_series, any_series)
@settings(max_examples=100, deadline=None)
def test_toolkit_product_bound(a, b):
    bound_a, bound_b = _certified(a, 2), _certified(b, 3)
    assert exp_bound_certify(a, *bound_a).passed
    c, r = toolkit_bound("product", bound_a, bound_b, rank=2)
    assert exp_bound_certify(a * b, c, r).passed

@given(positive_series)
@settings(max_examples=100, deadline=None)
def test_toolkit_inverse_bound(a):
    unit = 2 + a
    c, r = toolkit_bound("inverse", _certified(unit, 2), rank=2, constant=unit.constant_term)
    assert exp_bound_certify(series_inverse(unit), c, r).passed

@given(positive_series)
@settings(max_examples=100, deadline=None)
def test_toolkit_exp_bound(a):
    c, r = toolkit_bound("exp", _certified(a, 2), rank=2)
    assert exp_bound_certify(series_exp(a), c, r).passed

@given(any_series, unit_series, unit_series)
@settings(max_examples=100, deadline=None)
def test_toolkit_substitute_bound(a, f1, f2):
    c_f = max(_certified(f1, 2)[0], _certified(f2, 2)[0])
    c, r = toolkit_bound("substitute", _certified(a, 3), (c_f, 2), rank=2)
    assert exp_bound_certify(series_substitute(a, [f1, f2]), c, r).passed

def test_certificate_reports_failures():
    value = series(X, {(1,): 100})
    assert exp_bound_certify(value, 1, 10).passed
    report = exp_bound_certify(value, 1, 9)
    assert not report.passed
    assert report.failures == [((1,), Fraction(100), Fraction(81))]
    assert report.minimal_r == pytest.approx(10)

@pytest.mark.parametrize("r,passed", [(2, True), (Fraction(3, 2), False)])
def test_geometric_series_certificate(r, passed):
    geometric = series(X, {(n,): 2**n for n in range(20)}, 19)
    report = exp_bound_certify(geometric, 1, r)
    assert report.passed is passed
    assert report.minimal_r == pytest.approx(2 ** (19 / 20))

def test_certificate_handles_huge_coefficients():
    report = exp_bound_certify(series(X, {(1,): 10**400}), 1, 10**201)
    assert report.passed
    assert report.minimal_r == pytest.approx(1e200)
    assert exp_bound_certify(series(X, {(1,): 10**1000}), 1, 10**501).minimal_r == math.inf

def test_toolkit_bound_constants():
    assert toolkit_bound("product", (1, 2), (1, 3), rank=1) == (9, 6)
    with pytest.raises(SeriesDomainError):
        toolkit_bound("inverse", (1, 2), rank=1, constant=0)
    with pytest.raises(ValueError):
        toolkit_bound("sqrt", (1, 2), rank=1)

def test_chow_ring_relations():
    H1, H2, H3, H4 = (ChowElement.generator(i) for i in range(1, 5))
    assert len(CHOW_BASIS) == 24
    assert (H1**3).is_zero()
    assert (H2 * H2).is_zero()
    assert (H1 * H1 * H2 * H3 * H4).pairing() == 1
    assert chow_exp(H2) == 1 + H2
    assert chow_exp(H1).coefficient((2, 0, 0, 0)) == Fraction(1, 2)
    with pytest.raises(SeriesDomainError):
        chow_exp(1 + H1)

@given(chow_elements, chow_elements, chow_elements)
@settings(max_examples=100, deadline=None)
def test_chow_ring_axioms(a, b, c):
    assert chow_mul(a, b) == chow_mul(b, a)
    assert chow_mul(chow_mul(a, b), c) == chow_mul(a, chow_mul(b, c))
    assert a * (b + c) == a * b + a * c
    assert a * ChowElement.one() == a

@given(nilpotent_elements, nilpotent_elements)
@settings(max_examples=100, deadline=None)
def test_chow_exp_turns_sums_into_products(a, b):
    assert chow_exp(a + b) == chow_exp(a) * chow_exp(b)

def test_hbar_laurent_grading():
    H1 = ChowElement.generator(1)
    graded = HbarLaurent.from_graded(1 + H1 + H1 * H1, shift=-1)
    assert graded.powers() == [-3, -2, -1]
    assert graded.coefficient(-2) == H1
    product = graded * HbarLaurent.constant(H1)
    assert product.coefficient(-3).is_zero()
    assert graded.truncate_below(-2).powers() == [-2, -1]

def test_json_form():
    value = series(XY, {(1, 0): Fraction(-9, 4), (0, 2): 3})
    data = value.to_json()
    assert data["terms"] == [
        {"exp": [0, 2], "coeff": "3"},
        {"exp": [1, 0], "coeff": "-9/4"},
    ]
    assert QSeries.from_json(data) == value
