from fractions import Fraction

import mpmath
import pytest
import sympy

from i4mirror.elliptic import (
    RationalFunction,
    family_discriminant,
    j_from_modulus,
    j_from_modulus_squared,
    pencil_j_invariant,
    quartic_pencil_j,
    s,
    s_form,
    symmetric_locus_bridge,
    t,
    tate_limit,
    theta,
    theta_parameter,
    weierstrass_data,
    x2,
    y2,
)
from i4mirror.elliptic import generic_family, modular_consistency, pencil_modulus
from i4mirror.exceptions import DomainPointError
from i4mirror.mirror import pencil_parameter, specialize_symmetric


def test_two_paths_agree():
    assert weierstrass_data().j_invariant() == quartic_pencil_j()
    assert pencil_j_invariant().numerator.degree() == 24


def test_s_form():
    expected = RationalFunction.from_expr(
        16 * (s**4 + 14 * s**2 + 1) ** 3 / (s**2 * (s - 1) ** 4 * (s + 1) ** 4), s
    )
    assert s_form() == expected


def test_pencil_modulus_reproduces_j():
    assert j_from_modulus(pencil_modulus()) == pencil_j_invariant()
    assert pencil_modulus().variable == t


def test_rational_evaluation():
    j = pencil_j_invariant()
    value = j(Fraction(1, 3))
    assert isinstance(value, Fraction)
    assert value == j_from_modulus(Fraction(1, 3) + Fraction(3, 4))
    with pytest.raises(DomainPointError):
        j(Fraction(1, 2))


def test_modulus_formula():
    assert j_from_modulus_squared(Fraction(1, 2)) == 1728
    with pytest.raises(DomainPointError):
        j_from_modulus(0)
    with pytest.raises(DomainPointError):
        j_from_modulus(1)


def test_theta_domain():
    assert theta(1, 1j).value == 0
    with pytest.raises(ValueError):
        theta(5, 1j)
    with pytest.raises(DomainPointError):
        theta(3, -1j)


@pytest.mark.parametrize("kind", [2, 3, 4])
@pytest.mark.parametrize("rho", [1j, 1.5j, 3j])
def test_theta_against_jtheta(kind, rho):
    value = theta(kind, rho, tol=1e-30, dps=40)
    assert value.tail_bound < 1e-30
    with mpmath.workdps(40):
        assert abs(value.value - value.oracle()) < 1e-25


def test_jacobi_quartic_identity():
    with mpmath.workdps(40):
        t2, t3, t4 = (theta(kind, 1.2j, tol=1e-35, dps=40).value for kind in (2, 3, 4))
        assert abs(t3**4 - t2**4 - t4**4) < 1e-25


def test_bridge_guards():
    with pytest.raises(ValueError):
        symmetric_locus_bridge({}, 3j, nome_power=3)
    with pytest.raises(DomainPointError):
        symmetric_locus_bridge({}, -1j)


def test_bridge_without_walls(empty_equations):
    series = {
        "f": specialize_symmetric(empty_equations["f_(2,2)"]),
        "theta_self": specialize_symmetric(empty_equations.square_coefficient(1, 1)),
        "theta_cross": specialize_symmetric(empty_equations.square_coefficient(1, 3)),
        "t": pencil_parameter(empty_equations),
    }
    rows = symmetric_locus_bridge(series, 3j, dps=40)
    assert [row.identity for row in rows] == ["f", "theta_self", "theta_cross", "t"]
    for row in rows:
        assert row.residual < 1e-15, row.identity
    assert rows[0].expected == 2
    assert rows[0].to_json()["convention"] == "q = exp(i pi rho) = v^4"


def test_modular_consistency():
    report = modular_consistency(3j, dps=40)
    assert report.passed, report.checks
    assert report.to_json()["passed"] is True


def test_tate_limit():
    limit = tate_limit(dps=40)
    assert limit.ys == [5.0, 10.0, 20.0]
    assert limit.increasing


def test_theta_parameter_is_not_constant():
    at_2i, at_3i = (theta_parameter(rho, dps=40) for rho in (2j, 3j))
    assert abs(at_2i - at_3i) > 0.1
    assert abs(mpmath.im(at_2i)) < 1e-30
    assert 0.2 < mpmath.re(at_2i) < 0.21
    assert 0.09 < mpmath.re(at_3i) < 0.1
    with pytest.raises(DomainPointError):
        theta_parameter(-1j)


def test_family_discriminant():
    result = family_discriminant()
    assert sympy.expand(result.secondary + 16 * x2**2 * y2**2) == 0
    assert result.singular_fibres == 2
    assert family_discriminant(generic_family()).singular_fibres == 4
