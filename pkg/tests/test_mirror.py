from fractions import Fraction

import pytest

from i4mirror.exceptions import TruncationError
from i4mirror.mirror import (
    RayRef,
    WallDatum,
    WallTable,
    assemble_equations,
    closed_form_unbent,
    coefficient_key,
    enumerate_pairs,
    pencil_parameter,
    relabelled,
    single_bend_series,
    single_bend_terms,
    specialize_symmetric,
    spot_check,
    theta_label,
    theta_product_coefficients,
)
from i4mirror.mirror.equations import SYMMETRIC_LATTICE
from i4mirror.qseries import QSeries


def v_series(terms, truncation):
    return QSeries(SYMMETRIC_LATTICE, {(power,): c for power, c in terms.items()}, truncation)


@pytest.mark.parametrize(
    "target, label",
    [
        ((0, 0), "1"),
        ((0, 1), "D1"),
        ((3, 1), "D4"),
        ((2, 2), "2D2"),
        ((1, 2), "D1+D2"),
        ((7, 2), "D4+D1"),
    ],
)
def test_theta_label(target, label):
    assert theta_label(target) == label


def test_theta_label_offset():
    assert theta_label((0, 1), offset=1) == "D4"


def test_coefficient_key():
    assert coefficient_key("f", (2, 2)) == "f_(2,2)"
    assert coefficient_key("r3", (0, 0)) == "r3_0"


def test_ray_ref():
    ray = RayRef.parse("5:2")
    assert (ray.k, ray.height) == (5, 2)
    assert str(ray) == "5:2"
    assert RayRef(7) == RayRef(3)
    assert str(RayRef.parse(2)) == "2"
    assert RayRef(1, 2).shifted(1) == RayRef(3, 2)
    with pytest.raises(ValueError):
        RayRef(2, 2)
    with pytest.raises(ValueError):
        RayRef(0, 3)


def test_wall_datum_validation():
    with pytest.raises(ValueError):
        WallDatum(RayRef(1, 2), tangency=1, class_tag="E", count=1)
    with pytest.raises(ValueError):
        WallDatum(RayRef(0), tangency=1, class_tag="E", count=1, provenance="guess")
    wall = WallDatum(RayRef(0), tangency=2, class_tag="B", count="-9/4", fibre_steps=1)
    assert wall.count == Fraction(-9, 4)
    assert wall.exponent() == (1, 1, 1, 1, 2)


def test_wall_table_fixture(wall_table):
    assert len(wall_table) == 10
    assert [str(ray) for ray in wall_table.rays()] == ["0"]
    assert len(wall_table.on_ray(4, 1)) == 10
    assert wall_table.on_ray(1, 1) == []
    assert wall_table.min_grade() == 1


def test_wall_table_round_trip(wall_table, tmp_path):
    path = wall_table.dump(tmp_path / "walls.yaml")
    assert WallTable.load(path) == wall_table


def test_ray_function_bend_coefficients(wall_table):
    assert wall_table.ray_function(1, 1, 5) is None
    function = wall_table.ray_function(4, 1, 5)
    assert function.ray == (4, 1)
    lattice = wall_table.lattice
    assert function.bend_coefficient(1, 1) == QSeries(lattice, {(0, 0, 0, 0, 1): 9}, 5)
    assert function.bend_coefficient(2, 1) == QSeries(lattice, {(0, 0, 0, 0, 1): 18}, 5)
    # exp(9 S X - 9/2 S^2 X^2) at X^2
    assert function.bend_coefficient(1, 2) == QSeries(lattice, {(0, 0, 0, 0, 2): 36}, 5)


def test_shifted_table_moves_rays(wall_table):
    moved = wall_table.shifted(1)
    assert [str(ray) for ray in moved.rays()] == ["1"]
    assert moved.shifted(3) == wall_table


def test_replacing_walls_drops_cached_functions():
    table = WallTable(walls=[WallDatum(RayRef(0, 1), 1, "E1", 1)])
    assert isinstance(table.walls, tuple)
    first = table.ray_function(0, 1, 5).bend_coefficient(1, 1)
    table.walls = [*table.walls, WallDatum(RayRef(0, 1), 1, "E2", 1)]
    assert table.ray_function(0, 1, 5).bend_coefficient(1, 1) == first.scale(2)
    with pytest.raises(AttributeError):
        table.walls.append(WallDatum(RayRef(0, 1), 1, "E3", 1))


def test_enumeration_guards(empty_walls):
    with pytest.raises(TruncationError):
        enumerate_pairs((0, 1), (2, 1), (2, 2), empty_walls, 0)
    with pytest.raises(ValueError):
        enumerate_pairs((0, 2), (2, 1), (2, 2), empty_walls, 5)
    assert enumerate_pairs((0, 1), (2, 1), (2, 3), empty_walls, 5) == []


def test_unbent_pairs_have_straight_lines(empty_walls):
    pairs = enumerate_pairs((0, 1), (2, 1), (2, 2), empty_walls, 9)
    assert sorted(pair.contribution.min_grade() for pair in pairs) == [1, 9]
    for pair in pairs:
        assert pair.shape == "unbent"
        assert pair.bend_count == 0


@pytest.mark.parametrize("P, Q", [((0, 1), (2, 1)), ((1, 1), (3, 1)), ((0, 1), (0, 1))])
@pytest.mark.parametrize("x", range(8))
def test_closed_form_matches_enumeration(empty_walls, P, Q, x):
    table = theta_product_coefficients(P, Q, empty_walls, 16)
    expected = closed_form_unbent(P, Q, (x, 2), 16)
    found = table.get((x, 2), QSeries.zero(empty_walls.lattice, 16))
    assert found == expected


def test_product_is_symmetric(empty_walls):
    first = theta_product_coefficients((1, 1), (3, 1), empty_walls, 16)
    second = theta_product_coefficients((3, 1), (1, 1), empty_walls, 16)
    assert first == second


def test_f_coefficient_without_walls(empty_equations):
    value = specialize_symmetric(empty_equations["f_(2,2)"])
    assert value == v_series({1: 1, 9: 1, 25: 1}, 25)


def test_square_coefficients_without_walls(empty_equations):
    assert specialize_symmetric(empty_equations.square_coefficient(1, 1)) == v_series(
        {0: 1, 16: 2}, 25
    )
    assert specialize_symmetric(empty_equations.square_coefficient(1, 3)) == v_series(
        {4: 2}, 25
    )
    assert empty_equations.double_lift(3) == (4, 2)


def test_pencil_parameter_without_walls(empty_equations):
    t = pencil_parameter(empty_equations)
    assert t.truncate(9) == v_series({1: 1, 5: -2, 9: 5}, 9)


def test_spot_check_without_walls(empty_walls):
    report = spot_check((0, 1), (2, 1), empty_walls, 9)
    assert report.passed
    assert report.to_json()["passed"] is True


def test_relabelling_has_period_four(empty_equations):
    value = empty_equations["f_(2,2)"]
    assert relabelled(value, 4) == value
    assert relabelled(relabelled(value), 3) == value


def test_walls_bend_into_the_product(wall_table):
    coefficients = theta_product_coefficients((1, 1), (3, 1), wall_table, 9)
    assert any(exponent[4] for exponent, _ in coefficients[(0, 1)].items())


def test_shear_relabels_products_with_walls(wall_table):
    original = theta_product_coefficients((0, 1), (2, 1), wall_table, 9)
    sheared = theta_product_coefficients((1, 1), (3, 1), wall_table.shifted(1), 9)
    # (x, y) -> (x + y, y), targets are representatives modulo 4y
    expected = {
        ((x + y) % (4 * y), y): relabelled(value)
        for (x, y), value in original.items()
        if y
    }
    assert {target: value for target, value in sheared.items() if target[1]} == expected


def test_single_bend_terms():
    terms = list(single_bend_terms(40))
    assert [(m, n) for m, n, _ in terms] == [(1, 1)]
    assert terms[0][2].as_ints() == (8, 8, 8, 8)
    for m, n, exponent in single_bend_terms(200):
        assert exponent.is_effective()
        assert exponent.grade == 16 * n * (m + n)


def test_single_bend_series(wall_table, empty_walls):
    series = single_bend_series(wall_table, 40)
    assert series == QSeries(wall_table.lattice, {(8, 8, 8, 8, 1): 9}, 40)
    assert single_bend_series(empty_walls, 40).is_zero()


@pytest.mark.slow
def test_f_coefficient_to_grade_49(empty_walls):
    equations = assemble_equations(empty_walls, 49)
    value = specialize_symmetric(equations["f_(2,2)"])
    assert value == v_series({1: 1, 9: 1, 25: 1, 49: 1}, 49)
