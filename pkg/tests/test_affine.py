from fractions import Fraction

import pytest

from i4mirror.affine import (
    ConeChart,
    PLValue,
    cone_of,
    integral_points,
    kink,
    kink_index,
    phi,
    phi_difference_bound,
    relabel_cyclic,
    shear,
    theta_ray,
)
from i4mirror.exceptions import DomainPointError

D1, D2, D3, D4 = (PLValue.boundary(i) for i in range(1, 5))
F = PLValue.fibre()


@pytest.mark.parametrize(
    "point,value",
    [
        ((0, 1), PLValue.zero()),
        ((Fraction(1, 3), 1), PLValue.zero()),
        ((1, 1), PLValue.zero()),
        ((2, 1), D1),
        ((3, 1), D1 * 2 + D2),
        ((-1, 1), D4),
        ((8, 1), PLValue.of(10, 8, 6, 4)),
        ((9, 1), PLValue.of(12, 10, 8, 6)),
    ],
)
def test_phi_values(point, value):
    assert phi(point) == value


def test_phi_is_homogeneous():
    for k in range(-6, 7):
        assert phi((3 * k, 3)) == phi((k, 1)) * 3


def test_phi_needs_positive_height():
    with pytest.raises(DomainPointError):
        phi((1, 0))
    with pytest.raises(DomainPointError):
        phi((2, -1))


def test_charts_agree_on_rays():
    for k in range(-20, 21):
        assert ConeChart.starting_at(k - 1).evaluate((k, 1)) == ConeChart.starting_at(k).evaluate(
            (k, 1)
        )


def test_kinks_are_boundary_classes():
    assert [kink_index(k) for k in range(-1, 5)] == [3, 4, 1, 2, 3, 4]
    for k in range(-16, 17):
        assert kink(k) == PLValue.boundary(kink_index(k))
        second = phi((k + 1, 1)) + phi((k - 1, 1)) - phi((k, 1)) * 2
        assert second == kink(k)


def test_phi_is_effective():
    assert all(phi(point).is_effective() for point in integral_points(32))


def test_cone_of():
    assert cone_of((Fraction(1, 2), 1)).rays == ((0, 1), (1, 1))
    assert cone_of((Fraction(-1, 2), 1)).rays == ((-1, 1), (0, 1))
    assert cone_of((7, 2)).start == 3
    assert ConeChart.starting_at(-5).contains((-9, 2))
    with pytest.raises(ValueError):
        ConeChart(n=0, sector=4)


def test_shear_relabels_phi():
    for k in range(-8, 9):
        point = (k, 1)
        assert phi(shear(point)) == relabel_cyclic(phi(point)) + D1 * k
    assert shear((1, 2), steps=4) == (9, 2)


def test_theta_rays():
    assert [theta_ray(i) for i in range(1, 5)] == [(0, 1), (1, 1), (2, 1), (3, 1)]
    assert theta_ray(1, offset=1) == (1, 1)
    assert theta_ray(4, offset=2) == (1, 1)
    with pytest.raises(ValueError):
        theta_ray(5)


def test_difference_bound_at_nine():
    check = phi_difference_bound(9)
    assert check.difference == F * 2
    assert check.grade_bound == 3
    assert check.passed
    assert not check.literal_holds


@pytest.mark.parametrize("m", [*range(-40, -1), *range(2, 41)])
def test_difference_bound(m):
    assert phi_difference_bound(m).passed


def test_difference_bound_needs_distance():
    for m in (-1, 0, 1):
        with pytest.raises(ValueError):
            phi_difference_bound(m)


def test_pl_value_formatting():
    assert str(PLValue.zero()) == "0"
    assert str(D1 * 2 + D2) == "2D1 + D2"
    assert str(D1 - D3) == "D1 - D3"
    assert PLValue.boundary(0) == D4
    with pytest.raises(ValueError):
        PLValue.of(1, 2, 3)
