"""The affine base of the I4 mirror and its multi-valued PL function phi.

Points live in the developed universal cover of the dual intersection complex,
the open upper half plane {y > 0}. The integral points at height one are the
rays (k, 1), the deck transformation is the shear (x, y) -> (x + 4y, y) and
every maximal cone is spanned by two consecutive height-one rays.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

from cachetools import LRUCache, cached

from .exceptions import DomainPointError
from .utils import Rational, fraction_to_str

__all__ = [
    "ConeChart",
    "DifferenceBoundCheck",
    "PLValue",
    "UCoverPoint",
    "cone_of",
    "integral_points",
    "kink",
    "kink_index",
    "phi",
    "phi_difference_bound",
    "relabel_cyclic",
    "shear",
    "theta_ray",
    "y_grade",
]

logger = logging.getLogger(__name__)

PHI_CACHE: LRUCache = LRUCache(maxsize=8192)  # type: ignore

Vector = Sequence[Rational]


@dataclass(frozen=True)
class UCoverPoint:
    """Point of the universal cover, y must be positive."""

    x: Fraction
    y: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", Fraction(self.x))
        object.__setattr__(self, "y", Fraction(self.y))
        if self.y <= 0:
            raise DomainPointError(
                f"Points of the universal cover have y > 0, got ({self.x}, {self.y})."
            )

    @classmethod
    def coerce(cls, point: Union[UCoverPoint, Vector]) -> UCoverPoint:
        if isinstance(point, UCoverPoint):
            return point
        x, y = point
        return cls(Fraction(x), Fraction(y))

    @property
    def is_integral(self) -> bool:
        return self.x.denominator == 1 and self.y.denominator == 1

    @property
    def slope(self) -> Fraction:
        return self.x / self.y

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (self.x, self.y)


@dataclass(frozen=True)
class PLValue:
    """Integer (or rational) combination of D1..D4, F is (1, 1, 1, 1)."""

    coefficients: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self) -> None:
        values = tuple(Fraction(c) for c in self.coefficients)
        if len(values) != 4:
            raise ValueError(f"A PL value has four coefficients, got {values}.")
        object.__setattr__(self, "coefficients", values)

    @classmethod
    def of(cls, *coefficients: Rational) -> PLValue:
        return cls(tuple(coefficients))  # type: ignore[arg-type]

    @classmethod
    def zero(cls) -> PLValue:
        return cls.of(0, 0, 0, 0)

    @classmethod
    def fibre(cls, multiple: Rational = 1) -> PLValue:
        return cls.of(multiple, multiple, multiple, multiple)

    @classmethod
    def boundary(cls, index: int, multiple: Rational = 1) -> PLValue:
        """multiple * D_index where the index is read mod 4 (D0 is D4)."""
        position = (index - 1) % 4
        return cls(tuple(multiple if i == position else 0 for i in range(4)))  # type: ignore[arg-type]

    @property
    def grade(self) -> Fraction:
        return sum(self.coefficients, Fraction(0))

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coefficients)

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.coefficients)

    def min_component(self) -> Fraction:
        return min(self.coefficients)

    def dominates(self, other: PLValue) -> bool:
        """Componentwise self >= other."""
        return all(a >= b for a, b in zip(self.coefficients, other.coefficients))

    def as_ints(self) -> tuple[int, int, int, int]:
        if not self.is_integral:
            raise ValueError(f"{self} is not integral.")
        return tuple(int(c) for c in self.coefficients)  # type: ignore[return-value]

    def __add__(self, other: PLValue) -> PLValue:
        return PLValue(tuple(a + b for a, b in zip(self.coefficients, other.coefficients)))  # type: ignore[arg-type]

    def __sub__(self, other: PLValue) -> PLValue:
        return PLValue(tuple(a - b for a, b in zip(self.coefficients, other.coefficients)))  # type: ignore[arg-type]

    def __neg__(self) -> PLValue:
        return PLValue(tuple(-a for a in self.coefficients))  # type: ignore[arg-type]

    def __mul__(self, factor: Rational) -> PLValue:
        return PLValue(tuple(a * factor for a in self.coefficients))  # type: ignore[arg-type]

    __rmul__ = __mul__

    def __str__(self) -> str:
        parts = []
        for index, c in enumerate(self.coefficients, start=1):
            if not c:
                continue
            factor = "" if c == 1 else "-" if c == -1 else fraction_to_str(c)
            parts.append(f"{factor}D{index}")
        return " + ".join(parts).replace("+ -", "- ") or "0"


@dataclass(frozen=True)
class ConeChart:
    """The linear formula for phi on the cone <(4n+t, 1), (4n+t+1, 1)>."""

    n: int
    sector: int

    def __post_init__(self) -> None:
        if self.sector not in range(4):
            raise ValueError(f"Sector type must be 0, 1, 2 or 3, got {self.sector}.")

    @classmethod
    def starting_at(cls, k: int) -> ConeChart:
        """Chart of the cone <(k, 1), (k + 1, 1)>."""
        return cls(n=k // 4, sector=k % 4)

    @property
    def start(self) -> int:
        return 4 * self.n + self.sector

    @property
    def rays(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.start, 1), (self.start + 1, 1))

    def contains(self, point: Union[UCoverPoint, Vector]) -> bool:
        p = UCoverPoint.coerce(point)
        return self.start <= p.slope <= self.start + 1

    def linear_part(self) -> tuple[int, int, int, int]:
        """Coefficients of y in the chart formula (before the sign)."""
        n = self.n
        return (
            (n + 1) * (2 * n + 1) if self.sector >= 1 else n * (2 * n - 1),
            2 * (n + 1) ** 2 if self.sector >= 2 else 2 * n * n,
            (n + 1) * (2 * n + 3) if self.sector >= 3 else n * (2 * n + 1),
            n * (2 * n + 2),
        )

    def evaluate(self, point: Union[UCoverPoint, Vector]) -> PLValue:
        """Evaluate the chart formula, whether or not the point lies in the cone."""
        p = UCoverPoint.coerce(point)
        return self._formula(p.x, p.y)

    def _formula(self, x: Fraction, y: Fraction) -> PLValue:
        values = [self.n * x] * 4
        for index in range(self.sector):
            values[index] += x
        return PLValue(
            tuple(v - c * y for v, c in zip(values, self.linear_part()))  # type: ignore[arg-type]
        )


def cone_of(point: Union[UCoverPoint, Vector]) -> ConeChart:
    """The maximal cone containing the point, the one on its right when it lies on a ray."""
    p = UCoverPoint.coerce(point)
    return ConeChart.starting_at(math.floor(p.slope))


@cached(cache=PHI_CACHE)
def _phi(x: Fraction, y: Fraction) -> PLValue:
    return cone_of(UCoverPoint(x, y)).evaluate((x, y))


def phi(point: Union[UCoverPoint, Vector]) -> PLValue:
    """The PL function, normalized to vanish on the cone <(0, 1), (1, 1)>."""
    p = UCoverPoint.coerce(point)
    return _phi(p.x, p.y)


def kink_index(k: int) -> int:
    """Index i of the boundary class D_i attached to the ray (k, 1)."""
    return (k - 1) % 4 + 1


def kink(k: int) -> PLValue:
    """Class by which phi bends across the ray through (k, 1).

    Computed as the difference of the two adjacent chart formulas at a point
    where the primitive normal x - k*y equals one.
    """
    left, right = ConeChart.starting_at(k - 1), ConeChart.starting_at(k)
    point = (Fraction(k + 1), Fraction(1))
    return right.evaluate(point) - left.evaluate(point)


def y_grade(vector: Vector) -> Fraction:
    return Fraction(vector[1])


def shear(vector: Vector, steps: int = 1) -> tuple[Fraction, Fraction]:
    """The map (x, y) -> (x + steps * y, y), four steps are one deck transformation."""
    x, y = Fraction(vector[0]), Fraction(vector[1])
    return (x + steps * y, y)


def relabel_cyclic(value: PLValue, steps: int = 1) -> PLValue:
    """Send D_i to D_{i + steps}."""
    moved = [Fraction(0)] * 4
    for index, c in enumerate(value.coefficients):
        moved[(index + steps) % 4] = c
    return PLValue(tuple(moved))  # type: ignore[arg-type]


def theta_ray(index: int, offset: int = 0) -> tuple[int, int]:
    """Canonical height-one lift of the theta function labelled D_index."""
    if not 1 <= index <= 4:
        raise ValueError(f"Boundary components are D1..D4, got D{index}.")
    return ((index - 1 + offset) % 4, 1)


@dataclass
class DifferenceBoundCheck:
    """Comparison of phi(m, 1) with its neighbour towards the cone C."""

    m: int
    difference: PLValue
    grade_bound: int
    sharp_bound: PLValue
    literal_bound: PLValue

    @property
    def grade_holds(self) -> bool:
        return self.difference.grade >= self.grade_bound

    @property
    def sharp_holds(self) -> bool:
        return self.difference.dominates(self.sharp_bound)

    @property
    def literal_holds(self) -> bool:
        return self.difference.dominates(self.literal_bound)

    @property
    def passed(self) -> bool:
        return self.grade_holds and self.sharp_holds

    def to_json(self) -> dict[str, object]:
        return {
            "m": self.m,
            "difference": [fraction_to_str(c) for c in self.difference.coefficients],
            "grade_bound": self.grade_bound,
            "sharp_bound": [fraction_to_str(c) for c in self.sharp_bound.coefficients],
            "literal_holds": self.literal_holds,
            "passed": self.passed,
        }


def phi_difference_bound(m: int) -> DifferenceBoundCheck:
    """Check the growth of phi between neighbouring integral points.

    For m > 1 the difference is phi(m, 1) - phi(m - 1, 1), for m < -1 it is
    phi(m, 1) - phi(m + 1, 1). The check passes when the grade is at least
    2*floor(|m|/4) - 1 and the difference dominates floor(s/4)*F with
    s = m - 1, respectively s = |m|. The literal componentwise bound by a
    single boundary class is reported alongside but does not decide.
    """
    if -1 <= m <= 1:
        raise ValueError(f"The difference bound needs |m| > 1, got m={m}.")
    if m > 1:
        difference = phi((m, 1)) - phi((m - 1, 1))
        grade_bound = 2 * (m // 4) - 1
        sharp = PLValue.fibre((m - 1) // 4)
        literal = PLValue.boundary(m - 1, 2 * (m // 4) - 1)
    else:
        difference = phi((m, 1)) - phi((m + 1, 1))
        grade_bound = 2 * (-m // 4) - 1
        sharp = PLValue.fibre(-m // 4)
        literal = PLValue.boundary(m + 1, 1 - 2 * (m // 4))
    return DifferenceBoundCheck(
        m=m,
        difference=difference,
        grade_bound=grade_bound,
        sharp_bound=sharp,
        literal_bound=literal,
    )


def integral_points(radius: int) -> Iterator[tuple[int, int]]:
    """Height-one integral points (k, 1) with |k| <= radius."""
    for k in range(-radius, radius + 1):
        yield (k, 1)
