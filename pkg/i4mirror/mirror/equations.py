"""Mirror equations of the I4 family as truncated series.

The products theta_D1 * theta_D3, theta_D2 * theta_D4 and theta_Di^2 are
expanded in the theta basis at height at most two. Their structure constants
are stored under keys built from the product family and the canonical lift of
the target, e.g. ``f_(2,2)``, ``g_(1,1)``, ``r3_0``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator, Sequence

from ..affine import PLValue, phi, relabel_cyclic, theta_ray
from ..exceptions import EffectivityError, InvariantViolation
from ..qseries import ExponentLattice, QSeries, series_inverse, series_mul
from .broken_lines import theta_product_coefficients
from .walls import RayRef, WallTable

__all__ = [
    "SYMMETRIC_LATTICE",
    "MirrorEquations",
    "ReducedQuadrics",
    "SpotCheckReport",
    "assemble_equations",
    "coefficient_key",
    "pencil_parameter",
    "reduced_quadrics",
    "relabelled",
    "single_bend_series",
    "single_bend_terms",
    "specialize_symmetric",
    "spot_check",
]

logger = logging.getLogger(__name__)

SYMMETRIC_LATTICE = ExponentLattice(("v",), (1,))


def coefficient_key(family: str, target: Sequence[int]) -> str:
    if target[1] == 0:
        return f"{family}_0"
    return f"{family}_({target[0]},{target[1]})"


def _products(offset: int) -> dict[str, tuple[tuple[int, int], tuple[int, int]]]:
    products = {
        "f": (theta_ray(1, offset), theta_ray(3, offset)),
        "g": (theta_ray(2, offset), theta_ray(4, offset)),
    }
    for index in range(1, 5):
        products[f"r{index}"] = (theta_ray(index, offset), theta_ray(index, offset))
    return products


@dataclass
class MirrorEquations:
    """Structure constants of the three families of mirror equations."""

    truncation: int
    coefficients: dict[str, QSeries]
    products: dict[str, tuple[tuple[int, int], tuple[int, int]]]
    lattice: ExponentLattice
    theta_label_offset: int = 0

    def __getitem__(self, key: str) -> QSeries:
        if key in self.coefficients:
            return self.coefficients[key]
        return QSeries.zero(self.lattice, self.truncation)

    def family(self, name: str) -> dict[str, QSeries]:
        prefix = f"{name}_"
        return {k: v for k, v in self.coefficients.items() if k.startswith(prefix)}

    def square_coefficient(self, i: int, j: int) -> QSeries:
        """Coefficient of theta_2Dj in theta_Di^2, the leading 1 included."""
        own = self.double_lift(i)
        target = self.double_lift(j)
        value = self[coefficient_key(f"r{i}", target)]
        return value + 1 if target == own else value

    def double_lift(self, index: int) -> tuple[int, int]:
        """Canonical lift of 2D_index under the label offset."""
        x, _ = theta_ray(index, self.theta_label_offset)
        return ((2 * x) % 8, 2)

    def to_json(self) -> dict[str, Any]:
        return {
            "truncation": self.truncation,
            "theta_label_offset": self.theta_label_offset,
            "lattice": self.lattice.to_json(),
            "coefficients": {
                key: self.coefficients[key].to_json() for key in sorted(self.coefficients)
            },
        }


def assemble_equations(
    walls: WallTable, truncation: int, theta_label_offset: int = 0
) -> MirrorEquations:
    """Expand the products of the boundary theta functions up to ``truncation``."""
    products = _products(theta_label_offset)
    coefficients: dict[str, QSeries] = {}
    for family, (P, Q) in products.items():
        table = theta_product_coefficients(P, Q, walls, truncation)
        for target, series in table.items():
            key = coefficient_key(family, target)
            if family.startswith("r") and target == ((2 * P[0]) % 8, 2):
                if series.constant_term != 1:
                    raise InvariantViolation(
                        "leading-square-coefficient",
                        f"theta_{family[1:]}^2 has leading coefficient {series.constant_term}",
                    )
                series = series - 1
            if series:
                coefficients[key] = series
    equations = MirrorEquations(
        truncation=truncation,
        coefficients=coefficients,
        products=products,
        lattice=walls.lattice,
        theta_label_offset=theta_label_offset,
    )
    for index in range(1, 5):
        for other in (index, (index + 1) % 4 + 1):
            value = equations.square_coefficient(index, other) - (1 if other == index else 0)
            if value.constant_term:
                raise InvariantViolation(
                    "central-fibre",
                    f"theta_D{index}^2 has constant term {value.constant_term} at 2D{other}",
                )
    logger.info(
        "Assembled %d nonzero coefficients to order %d.", len(coefficients), truncation
    )
    return equations


def specialize_symmetric(series: QSeries) -> QSeries:
    """Send every z^(D_i) to v, so the v-exponent of a term is its grade."""
    grade = series.lattice.grade
    return QSeries(
        SYMMETRIC_LATTICE,
        (((grade(exponent),), coefficient) for exponent, coefficient in series.items()),
        series.truncation,
    )


@dataclass
class ReducedQuadrics:
    """theta_D1 theta_D3 = A2 theta_D2^2 + A4 theta_D4^2 and its partner."""

    A2: QSeries
    A4: QSeries
    B1: QSeries
    B3: QSeries

    def items(self) -> Iterator[tuple[str, QSeries]]:
        yield from (("A2", self.A2), ("A4", self.A4), ("B1", self.B1), ("B3", self.B3))

    def to_json(self) -> dict[str, Any]:
        return {name: series.to_json() for name, series in self.items()}


def _solve(
    left: QSeries, right: QSeries, c_ll: QSeries, c_lr: QSeries, c_rl: QSeries, c_rr: QSeries
) -> tuple[QSeries, QSeries]:
    # theta_Dl^2 = c_ll T_l + c_lr T_r and theta_Dr^2 = c_rl T_l + c_rr T_r,
    # the product is left * T_l + right * T_r.
    determinant = series_mul(c_ll, c_rr) - series_mul(c_lr, c_rl)
    inverse = series_inverse(determinant)
    first = series_mul(series_mul(left, c_rr) - series_mul(right, c_rl), inverse)
    second = series_mul(series_mul(right, c_ll) - series_mul(left, c_lr), inverse)
    return first, second


def reduced_quadrics(equations: MirrorEquations) -> ReducedQuadrics:
    """Eliminate the theta_2Di to get two quadrics in the theta_Di."""
    double = equations.double_lift
    c = equations.square_coefficient
    f_left = equations[coefficient_key("f", double(2))]
    f_right = equations[coefficient_key("f", double(4))]
    g_left = equations[coefficient_key("g", double(1))]
    g_right = equations[coefficient_key("g", double(3))]
    A2, A4 = _solve(f_left, f_right, c(2, 2), c(2, 4), c(4, 2), c(4, 4))
    B1, B3 = _solve(g_left, g_right, c(1, 1), c(1, 3), c(3, 1), c(3, 3))
    return ReducedQuadrics(A2=A2, A4=A4, B1=B1, B3=B3)


def pencil_parameter(equations: MirrorEquations) -> QSeries:
    """The common specialization t(v) of the four quadric coefficients."""
    quadrics = reduced_quadrics(equations)
    specialized = {name: specialize_symmetric(s) for name, s in quadrics.items()}
    reference = specialized["A2"]
    for name, series in specialized.items():
        if series != reference:
            raise InvariantViolation(
                "symmetric-pencil",
                f"{name} specializes to {series}, A2 to {reference}",
            )
    return reference


def single_bend_terms(truncation: int) -> Iterator[tuple[int, int, PLValue]]:
    """(m, n, phi(4m+4n, 1) - phi(4m, 1) + phi(-4n, 1)) for m, n >= 1 up to grade."""
    n = 1
    while 16 * n * (n + 1) <= truncation:
        m = 1
        while 16 * n * (m + n) <= truncation:
            exponent = phi((4 * m + 4 * n, 1)) - phi((4 * m, 1)) + phi((-4 * n, 1))
            yield m, n, exponent
            m += 1
        n += 1


def single_bend_series(walls: WallTable, truncation: int) -> QSeries:
    """Double sum of the single bends off the tangency-one walls on the ray (0, 1).

    Factors as (sum over m, n of the phi-exponents) times (sum of the wall terms).
    """
    lattice = walls.lattice
    wall_sum = QSeries(
        lattice,
        (
            (wall.exponent(walls.section_grade), wall.count)
            for wall in walls
            if wall.tangency == 1 and wall.ray == RayRef(0)
        ),
        truncation,
    )
    if wall_sum.is_zero():
        return QSeries.zero(lattice, truncation)
    terms: dict[tuple[int, ...], Fraction] = {}
    for m, n, exponent in single_bend_terms(truncation):
        if not exponent.is_effective():
            raise EffectivityError(f"The single bend (m={m}, n={n}) has exponent {exponent}.")
        vector = (*exponent.as_ints(), 0)
        terms[vector] = terms.get(vector, Fraction(0)) + 1
    return series_mul(QSeries(lattice, terms, truncation), wall_sum)


@dataclass
class SpotCheckReport:
    P: tuple[int, int]
    Q: tuple[int, int]
    truncation: int
    differences: dict[str, QSeries] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.differences

    def to_json(self) -> dict[str, Any]:
        return {
            "P": list(self.P),
            "Q": list(self.Q),
            "truncation": self.truncation,
            "passed": self.passed,
            "differences": {k: v.to_json() for k, v in self.differences.items()},
        }


def spot_check(
    P: Sequence[int], Q: Sequence[int], walls: WallTable, truncation: int
) -> SpotCheckReport:
    """Recompute a product at the opposite side of every ray and compare."""
    P, Q = (int(P[0]), int(P[1])), (int(Q[0]), int(Q[1]))
    first = theta_product_coefficients(P, Q, walls, truncation)
    second = theta_product_coefficients(
        P, Q, walls, truncation, side=-1, origin_slope=Fraction(2, 3)
    )
    report = SpotCheckReport(P=P, Q=Q, truncation=truncation)
    zero = QSeries.zero(walls.lattice, truncation)
    for target in sorted(set(first) | set(second)):
        difference = first.get(target, zero) - second.get(target, zero)
        if difference:
            report.differences[coefficient_key("d", target)] = difference
    if not report.passed:
        logger.warning(
            "Endpoint spot check of %s * %s differs at %s.", P, Q, sorted(report.differences)
        )
    return report


def relabelled(series: QSeries, steps: int = 1) -> QSeries:
    """Apply D_i -> D_{i + steps} to the exponents of a mirror-lattice series."""

    def move(exponent: tuple[int, ...]) -> tuple[int, ...]:
        d = relabel_cyclic(PLValue(tuple(exponent[:4])), steps).as_ints()  # type: ignore[arg-type]
        return (*d, *exponent[4:])

    return series.map_exponents(move, series.lattice)
