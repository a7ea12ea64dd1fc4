from fractions import Fraction

import pytest

from i4mirror.exceptions import ClassNotComputedError, I4MirrorError
from i4mirror.gw import (
    CLASS_LATTICE,
    PUBLISHED_BISECTION_COUNTS,
    SectionClass,
    ThreefoldClass,
    bisection_class,
    bisection_classes,
    bryan_leung_onset,
    bryan_leung_series,
    curve_count,
    default_walls,
    extract_curve_count,
    goldilocks_zone,
    harmonic,
    i_function,
    mirror_map,
    mirror_map_degrees,
    predicted_bisection_count,
    stirling_certificate,
    to_wall_counts,
)
from i4mirror.qseries import QSeries, series_exp, series_substitute


def _product_oracle(order):
    """Coefficients of prod (1 - z^m)^-12 by repeated geometric series."""
    coefficients = [1] + [0] * order
    for m in range(1, order + 1):
        for _ in range(12):
            for n in range(m, order + 1):
                coefficients[n] += coefficients[n - m]
    return coefficients


def test_bryan_leung_first_coefficients():
    series = bryan_leung_series(3)
    assert [series.coefficient((m,)) for m in range(4)] == [1, 12, 90, 520]
    with pytest.raises(ValueError):
        bryan_leung_series(-1)


def test_bryan_leung_against_product():
    series = bryan_leung_series(30)
    assert [series.coefficient((m,)) for m in range(31)] == _product_oracle(30)


def test_bryan_leung_onset():
    assert bryan_leung_onset(150) == 98
    assert bryan_leung_onset(20) is None


def test_section_class():
    line = SectionClass(1, (1, 1, 0, 0, 0, 0, 0, 0, 0))
    assert str(line) == "H - E1 - E2"
    assert line.fibre_degree == 1
    assert line.self_intersection == -1
    assert line.arithmetic_genus == 0
    with pytest.raises(ValueError):
        SectionClass(1, (1, 1))


def test_goldilocks_zone_sizes():
    assert len(goldilocks_zone(0)) == 9
    assert len(goldilocks_zone(1)) == 36
    assert all(section.arithmetic_genus >= 0 for section in goldilocks_zone(1))
    with pytest.raises(ValueError):
        goldilocks_zone(-1)


def test_bisection_classes():
    assert bisection_classes(0) == []
    assert len(bisection_classes(1)) == 9
    assert len(bisection_classes(2)) == 126
    for section in bisection_classes(2):
        assert section.fibre_degree == 2
        assert section.arithmetic_genus == 0


@pytest.mark.parametrize("degree", [0, 1, 2])
def test_predicted_bisection_counts(degree):
    assert predicted_bisection_count(degree) == PUBLISHED_BISECTION_COUNTS[degree]


def test_threefold_class():
    beta = ThreefoldClass.of([1, 2, 0, 1])
    assert beta == bisection_class(1)
    assert beta.grade == 4
    assert beta.degree == 0
    assert str(beta) == "1,2,0,1"
    assert len(list(ThreefoldClass(1, 1, 0, 0).below())) == 4
    with pytest.raises(ValueError):
        ThreefoldClass(-1, 0, 0, 0)


def test_harmonic():
    assert harmonic(3, 1) == Fraction(11, 6)
    assert harmonic(0, 2) == 0


def test_i_function_table():
    table = i_function(max_grade=1)
    assert len(table.classes) == 5
    assert table.max_grade == 1
    assert table.scalar_factor(ThreefoldClass(0, 0, 0, 0)) == 1
    assert table.scalar_factor(ThreefoldClass(1, 0, 0, 0)) == 6
    assert table.scalar_factor(ThreefoldClass(0, 0, 0, 1)) == 2
    with pytest.raises(ClassNotComputedError):
        table[ThreefoldClass(2, 0, 0, 0)]
    with pytest.raises(ValueError):
        i_function()
    assert len(table.to_json()["classes"]) == 5


def test_stirling_certificate():
    assert stirling_certificate(i_function(max_grade=2)).passed


def test_mirror_map_degrees():
    table = i_function(max_grade=2)
    solved = mirror_map(table)
    assert solved.F.constant_term == 1
    assert mirror_map_degrees(table, solved).passed


def test_mirror_map_inverse_undoes_the_exponentiated_shift():
    solved = mirror_map(i_function(max_grade=2))
    assert len(solved.inverse) == 4
    assert any(not component.is_zero() for component in solved.f)
    multipliers = [series_exp(component) for component in solved.f]
    one = QSeries.one(CLASS_LATTICE, 2)
    for m, h in zip(multipliers, solved.inverse):
        assert h * series_substitute(m, solved.inverse) == one
        assert m * series_substitute(h, multipliers) == one


def test_extract_curve_count_guards():
    solved = mirror_map(i_function(max_grade=1))
    with pytest.raises(I4MirrorError):
        extract_curve_count(solved.J, ThreefoldClass(1, 0, 0, 0))
    with pytest.raises(ValueError):
        extract_curve_count(solved.J, ThreefoldClass(0, 1, 0, 0), "other")
    with pytest.raises(ClassNotComputedError):
        extract_curve_count(solved.J, ThreefoldClass(3, 0, 0, 0))


def test_degree_zero_bisection_count():
    beta = bisection_class(0)
    assert curve_count(beta) == -9
    assert curve_count(beta, normalization="raw") == -18


def test_degree_one_bisection_count():
    assert curve_count(bisection_class(1)) == 144


@pytest.mark.slow
def test_degree_two_bisection_count():
    assert curve_count(bisection_class(2)) == 1980
    assert curve_count(bisection_class(2), normalization="raw") == 3960


def test_default_walls():
    walls = default_walls(2)
    sections = [wall for wall in walls if wall.tangency == 1]
    bisections = [wall for wall in walls if wall.tangency == 2]
    assert len(sections) == 27
    assert sorted({wall.count for wall in sections}) == [1, 12, 90]
    assert [wall.count for wall in bisections] == [Fraction(-9, 4), 36, 495]
    assert {wall.provenance for wall in walls} == {"published"}


def test_to_wall_counts_skips_high_degrees():
    walls = to_wall_counts({0: -9, 3: 1}, 1)
    assert len(walls) == 19
    assert walls.walls[-1].provenance == "derived"
    assert walls.walls[-1].count == Fraction(-9, 4)
