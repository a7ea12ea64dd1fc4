"""Curve counts feeding the wall functions.

Tangency-one walls come from the Bryan-Leung series of sections of the
elliptic surface. Tangency-two walls come from genus zero invariants of the
unravelled threefold, a complete intersection of a (3,1,0,0) and a (0,1,1,2)
hypersurface in P2 x P1 x P1 x P1, read off from its J-function.

The I-function is computed in graded form: the summand of a class beta with
third degree c is hbar^-c times G(H/hbar) for an element G of the Chow ring,
so the whole hbar dependence is bookkeeping of degrees.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Iterable, Iterator, Mapping, Sequence

from cachetools import LRUCache, cached
from sympy import divisor_sigma

from .exceptions import ClassNotComputedError, I4MirrorError, SeriesDomainError
from .mirror.walls import RayRef, WallDatum, WallTable
from .qseries import (
    CHOW_BASIS,
    CertificateReport,
    ChowElement,
    ExponentLattice,
    HbarLaurent,
    QSeries,
    chow_exp,
    exp_bound_certify,
    invert_substitution,
    series_exp,
    series_inverse,
    series_log,
    series_mul,
    series_substitute,
)
from .utils import Rational, factorial

__all__ = [
    "CLASS_LATTICE",
    "EULER_CLASS",
    "PUBLISHED_BISECTION_COUNTS",
    "STIRLING_RADIUS",
    "IFunctionTable",
    "JFunctionTable",
    "DegreeCheck",
    "MirrorMap",
    "SectionClass",
    "ThreefoldClass",
    "bisection_class",
    "bisection_classes",
    "bryan_leung_onset",
    "bryan_leung_series",
    "curve_count",
    "default_walls",
    "extract_curve_count",
    "goldilocks_constant",
    "goldilocks_window",
    "goldilocks_zone",
    "i_function",
    "mirror_map",
    "mirror_map_degrees",
    "predicted_bisection_count",
    "stirling_certificate",
    "to_wall_counts",
]

logger = logging.getLogger(__name__)

BRYAN_LEUNG_CACHE: LRUCache = LRUCache(maxsize=64)  # type: ignore
IFUNCTION_CACHE: LRUCache = LRUCache(maxsize=4096)  # type: ignore
HARMONIC_CACHE: LRUCache = LRUCache(maxsize=4096)  # type: ignore

#: One factor 27 for each of the two factorial ratios of the summand.
STIRLING_RADIUS = Fraction(27 * 27)

#: Bisection counts of degree 0, 1 and 2 extracted from the J-function.
PUBLISHED_BISECTION_COUNTS: dict[int, Fraction] = {
    0: Fraction(-9),
    1: Fraction(144),
    2: Fraction(1980),
}

CLASS_LATTICE = ExponentLattice.uniform("q1", "q2", "q3", "q4")

H1, H2, H3, H4 = (ChowElement.generator(i) for i in range(1, 5))
#: First Chern classes of the two line bundles cutting out the threefold.
L1 = ChowElement.linear((3, 1, 0, 0))
L2 = ChowElement.linear((0, 1, 1, 2))
EULER_CLASS = L1 * L2


def bryan_leung_series(order: int) -> QSeries:
    """prod_{m >= 1} (1 - z^m)^-12 up to z^order."""
    if order < 0:
        raise ValueError(f"The order must be nonnegative, got {order}.")
    lattice = ExponentLattice.uniform("z")
    coefficients = _bryan_leung_coefficients(order)
    return QSeries(lattice, (((m,), c) for m, c in enumerate(coefficients)), order)


def bryan_leung_onset(order: int, base: int = 2) -> int | None:
    """Smallest m0 with coefficient(z^m) < base^m for every m0 <= m <= order.

    The coefficients grow like exp(4 pi sqrt(m)), so they end up below 2^m,
    but only from m = 98 on. None when the bound fails at ``order`` itself.
    """
    coefficients = _bryan_leung_coefficients(order)
    onset = None
    for m in range(order, 0, -1):
        if coefficients[m] >= base**m:
            break
        onset = m
    return onset


@cached(cache=BRYAN_LEUNG_CACHE)
def _bryan_leung_coefficients(order: int) -> tuple[int, ...]:
    # n p(n) = 12 sum_{k=1}^n sigma(k) p(n - k)
    values = [1]
    for n in range(1, order + 1):
        total = sum(int(divisor_sigma(k)) * values[n - k] for k in range(1, n + 1))
        values.append(12 * total // n)
    return tuple(values)


@dataclass(frozen=True, order=True)
class SectionClass:
    """The class d*H - sum a_i E_i on the blow-up of P2 in nine points."""

    d: int
    a: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        if len(self.a) != 9:
            raise ValueError(f"A class needs nine exceptional coefficients, got {self.a}.")

    @property
    def fibre_degree(self) -> int:
        """Intersection with the fibre class F = 3H - sum E_i."""
        return 3 * self.d - sum(self.a)

    @property
    def self_intersection(self) -> int:
        return self.d * self.d - sum(x * x for x in self.a)

    @property
    def arithmetic_genus(self) -> Fraction:
        """p_a = 1 + (C.C - C.F) / 2, the canonical class being -F."""
        return 1 + Fraction(self.self_intersection - self.fibre_degree, 2)

    def __str__(self) -> str:
        parts = [f"{self.d}H" if self.d != 1 else "H"] if self.d else []
        for index, x in enumerate(self.a, start=1):
            if x:
                sign = "-" if x > 0 else "+"
                factor = "" if abs(x) == 1 else str(abs(x))
                parts.append(f"{sign} {factor}E{index}")
        return " ".join(parts).lstrip("+ ") or "0"


def _vectors(
    length: int, total: int, budget: int, low: int, high: int
) -> Iterator[tuple[int, ...]]:
    """Integer vectors in [low, high]^length with the given sum and sum of squares <= budget."""
    if length == 0:
        if total == 0:
            yield ()
        return
    for x in range(low, high + 1):
        rest = budget - x * x
        if rest < 0:
            continue
        remaining = total - x
        # Cauchy-Schwarz: (sum of the rest)^2 <= (length - 1) * (sum of their squares).
        if remaining * remaining > (length - 1) * rest:
            continue
        for tail in _vectors(length - 1, remaining, rest, low, high):
            yield (x, *tail)


def goldilocks_window(d: int, slack: int = 1) -> tuple[int, int]:
    """Per-coordinate search window around (3d - 1) / 9 of radius sqrt(d) + 2 + slack."""
    center = Fraction(3 * d - 1, 9)
    radius = math.isqrt(d) + 3 + slack
    return math.floor(center) - radius, math.ceil(center) + radius


def goldilocks_zone(d: int, slack: int = 1) -> list[SectionClass]:
    """Section classes of degree d of arithmetic genus >= 0 in the window."""
    if d < 0:
        raise ValueError(f"The degree must be nonnegative, got {d}.")
    low, high = goldilocks_window(d, slack)
    classes = []
    for a in _vectors(9, 3 * d - 1, 3 + d * d, low, high):
        section = SectionClass(d, a)
        if section.arithmetic_genus >= 0:
            classes.append(section)
    logger.debug("Goldilocks zone of degree %d has %d classes.", d, len(classes))
    return sorted(classes)


def goldilocks_constant(max_degree: int) -> Fraction:
    """Smallest N (to 1/1000) with |GZ(S, d)| <= (N sqrt(d) + N)^9 for d <= max_degree."""
    best = 0.0
    for d in range(max_degree + 1):
        size = len(goldilocks_zone(d))
        best = max(best, size ** (1 / 9) / (math.sqrt(d) + 1))
    return Fraction(math.ceil(best * 1000), 1000)


def bisection_classes(d: int) -> list[SectionClass]:
    """Classes with fibre degree two and arithmetic genus zero."""
    if d < 0:
        raise ValueError(f"The degree must be nonnegative, got {d}.")
    classes = [
        SectionClass(d, a)
        for a in _vectors(9, 3 * d - 2, d * d, -d - 1, d + 1)
        if d * d - sum(x * x for x in a) == 0
    ]
    return sorted(classes)


def predicted_bisection_count(a: int) -> int:
    """16 |bisections of degree a| - |GZ(S, a / 2)|, the second term for even a only.

    Each irreducible bisection is seen 4 x 2 x 2 times on the threefold, each
    pair of sections bubbling off a fibre contributes -1/4 four times.
    """
    count = 16 * len(bisection_classes(a))
    if a % 2 == 0:
        count -= len(goldilocks_zone(a // 2))
    return count


@dataclass(frozen=True, order=True)
class ThreefoldClass:
    """Curve class (a, b, c, d) by degrees against H1..H4."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        if min(self.vector) < 0:
            raise ValueError(f"Curve classes are effective, got {self.vector}.")

    @classmethod
    def of(cls, vector: Sequence[int]) -> ThreefoldClass:
        a, b, c, d = (int(x) for x in vector)
        return cls(a, b, c, d)

    @property
    def vector(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    @property
    def grade(self) -> int:
        return self.a + self.b + self.c + self.d

    @property
    def degree(self) -> int:
        """deg z^beta = beta . H3, from c1(T) - c1(L1) - c1(L2) = H3."""
        return self.c

    def below(self) -> Iterator[ThreefoldClass]:
        """All classes componentwise below this one, itself included."""
        for vector in product(*(range(x + 1) for x in self.vector)):
            yield ThreefoldClass.of(vector)

    def __str__(self) -> str:
        return ",".join(str(x) for x in self.vector)


@cached(cache=HARMONIC_CACHE)
def harmonic(n: int, power: int) -> Fraction:
    return sum((Fraction(1, m**power) for m in range(1, n + 1)), Fraction(0))


@cached(cache=IFUNCTION_CACHE)
def _graded_summand(beta: ThreefoldClass) -> tuple[Fraction, ChowElement]:
    a, b, c, d = beta.vector
    scalar = Fraction(
        factorial(3 * a + b) * factorial(b + c + 2 * d),
        factorial(a) ** 3 * factorial(b) ** 2 * factorial(c) ** 2 * factorial(d) ** 2,
    )
    # log of prod (1 + X/m) over the numerator minus the denominator factors
    logarithm = ChowElement.zero()
    for j in range(1, 6):
        combination = (
            L1**j * harmonic(3 * a + b, j)
            + L2**j * harmonic(b + c + 2 * d, j)
            - H1**j * (3 * harmonic(a, j))
            - H2**j * (2 * harmonic(b, j))
            - H3**j * (2 * harmonic(c, j))
            - H4**j * (2 * harmonic(d, j))
        )
        logarithm = logarithm + combination * Fraction((-1) ** (j + 1), j)
    return scalar, chow_exp(logarithm)


@dataclass
class IFunctionTable:
    """Summands of the I-function, one per curve class.

    ``reduced[beta]`` is the summand divided by the Euler class, which is
    what the mirror map works with.
    """

    classes: tuple[ThreefoldClass, ...]
    reduced: dict[ThreefoldClass, HbarLaurent]

    def __contains__(self, beta: object) -> bool:
        return beta in self.reduced

    def __getitem__(self, beta: ThreefoldClass) -> HbarLaurent:
        if beta not in self.reduced:
            raise ClassNotComputedError(f"No I-function summand for the class {beta}.")
        return self.reduced[beta] * EULER_CLASS

    @property
    def max_grade(self) -> int:
        return max((beta.grade for beta in self.classes), default=0)

    def scalar_factor(self, beta: ThreefoldClass) -> Fraction:
        return _graded_summand(beta)[0]

    def coefficient_entries(self) -> Iterator[tuple[tuple[int, ...], Fraction]]:
        """Every coefficient of the reduced and of the full summands, keyed by class."""
        for beta in self.classes:
            for power in self.reduced[beta].powers():
                component = self.reduced[beta].coefficient(power)
                for element in (component, component * EULER_CLASS):
                    for _, value in element.items():
                        yield beta.vector, value

    def to_json(self) -> dict[str, Any]:
        return {
            "classes": [list(beta.vector) for beta in self.classes],
            "summands": {str(beta): self[beta].to_json() for beta in self.classes},
        }


def _class_set(max_grade: int | None, box: ThreefoldClass | None) -> tuple[ThreefoldClass, ...]:
    if box is not None:
        return tuple(sorted(box.below(), key=lambda beta: (beta.grade, beta.vector)))
    if max_grade is None or max_grade < 0:
        raise ValueError("Give a nonnegative max_grade or a class to bound the table.")
    classes = [
        ThreefoldClass.of(vector)
        for vector in product(range(max_grade + 1), repeat=4)
        if sum(vector) <= max_grade
    ]
    return tuple(sorted(classes, key=lambda beta: (beta.grade, beta.vector)))


def i_function(max_grade: int | None = None, box: ThreefoldClass | None = None) -> IFunctionTable:
    """I-function summands for all classes of grade <= max_grade, or below ``box``."""
    classes = _class_set(max_grade, box)
    reduced = {}
    for beta in classes:
        scalar, element = _graded_summand(beta)
        reduced[beta] = HbarLaurent.from_graded(element * scalar, shift=-beta.c)
        logger.debug("I-function summand of %s has scalar factor %s.", beta, scalar)
    logger.info("Computed %d I-function summands.", len(classes))
    return IFunctionTable(classes=classes, reduced=reduced)


def stirling_certificate(table: IFunctionTable, c: Rational = 1) -> CertificateReport:
    """Certify |coefficient| <= c * r^diag(beta) over the table with the Stirling radius."""
    return exp_bound_certify(list(table.coefficient_entries()), c, STIRLING_RADIUS)


ClassSeries = dict[ThreefoldClass, HbarLaurent]


def _class_mul(
    x: ClassSeries, y: ClassSeries, classes: frozenset[ThreefoldClass], floor: int
) -> ClassSeries:
    result: ClassSeries = {}
    for alpha, left in x.items():
        for beta, right in y.items():
            gamma = (
                alpha.a + beta.a,
                alpha.b + beta.b,
                alpha.c + beta.c,
                alpha.d + beta.d,
            )
            key = ThreefoldClass.of(gamma)
            if key not in classes:
                continue
            value = (left * right).truncate_below(floor)
            result[key] = result.get(key, HbarLaurent()) + value
    return {k: v for k, v in result.items() if not v.is_zero()}


def _class_exp(x: ClassSeries, classes: frozenset[ThreefoldClass], floor: int) -> ClassSeries:
    zero = ThreefoldClass(0, 0, 0, 0)
    if zero in x:
        raise SeriesDomainError("The exponent must vanish at the zero class.")
    one = {zero: HbarLaurent.constant(ChowElement.one())}
    result = dict(one)
    power = one
    top = max((beta.grade for beta in classes), default=0)
    for n in range(1, top + 1):
        power = _class_mul(power, x, classes, floor)
        if not power:
            break
        scale = Fraction(1, factorial(n))
        for beta, value in power.items():
            result[beta] = result.get(beta, HbarLaurent()) + value * scale
    return result


@dataclass
class JFunctionTable:
    classes: tuple[ThreefoldClass, ...]
    terms: dict[ThreefoldClass, HbarLaurent]
    hbar_depth: int = 2

    def __contains__(self, beta: object) -> bool:
        return beta in set(self.classes)

    def __getitem__(self, beta: ThreefoldClass) -> HbarLaurent:
        if beta not in self:
            raise ClassNotComputedError(f"The J-function was not computed at {beta}.")
        return self.terms.get(beta, HbarLaurent())

    def to_json(self) -> dict[str, Any]:
        return {str(beta): self[beta].to_json() for beta in self.classes}


@dataclass
class MirrorMap:
    """The change of variables relating I and J and the resulting J-function."""

    F: QSeries
    f0: QSeries
    f: list[QSeries]
    h: QSeries
    J: JFunctionTable
    inverse: list[QSeries] = field(default_factory=list)

    def normalization_defects(self) -> list[ThreefoldClass]:
        """Nonzero classes whose J-term has a nonzero hbar^0 or hbar^-1 part."""
        defects = []
        for beta in self.J.classes:
            if beta.grade == 0:
                continue
            term = self.J[beta]
            if not term.coefficient(0).is_zero() or not term.coefficient(-1).is_zero():
                defects.append(beta)
        return defects

    def to_json(self) -> dict[str, Any]:
        return {
            "F": self.F.to_json(),
            "f0": self.f0.to_json(),
            "f": [series.to_json() for series in self.f],
            "h": self.h.to_json(),
        }


def mirror_map(table: IFunctionTable, hbar_depth: int = 2) -> MirrorMap:
    """Solve for the change of variables and compute J from I.

    I = F * exp((sum f_i H_i + h) / hbar) * J(Q) with Q_i = q_i exp(f_i),
    hbar powers below -hbar_depth are dropped.
    """
    classes = frozenset(table.classes)
    truncation = table.max_grade
    floor = -hbar_depth

    def series(values: Iterable[tuple[ThreefoldClass, Rational]]) -> QSeries:
        return QSeries(CLASS_LATTICE, ((beta.vector, v) for beta, v in values), truncation)

    def inside(exponent: Sequence[int]) -> bool:
        return ThreefoldClass.of(exponent) in classes

    F = series(
        (beta, table.reduced[beta].coefficient(0).constant)
        for beta in table.classes
        if beta.c == 0
    )
    if not F.constant_term:
        raise SeriesDomainError("The hbar^0 part of I is not invertible.")
    F_inverse = series_inverse(F).restrict(inside)
    f = []
    for index in range(1, 5):
        monomial = tuple(int(i == index - 1) for i in range(4))
        raw = series(
            (beta, table.reduced[beta].coefficient(-1).coefficient(monomial))
            for beta in table.classes
            if beta.c == 0
        )
        f.append(series_mul(raw, F_inverse).restrict(inside))
    h = series_mul(
        series(
            (beta, table.reduced[beta].coefficient(-1).constant)
            for beta in table.classes
            if beta.c == 1
        ),
        F_inverse,
    ).restrict(inside)
    logger.info("Mirror map solved on %d classes.", len(classes))

    normalized: ClassSeries = {}
    for beta in table.classes:
        for alpha, scale in F_inverse.items():
            gamma = ThreefoldClass.of(tuple(x + y for x, y in zip(beta.vector, alpha)))
            if gamma in classes:
                value = table.reduced[beta].truncate_below(floor) * scale
                normalized[gamma] = normalized.get(gamma, HbarLaurent()) + value

    shift: ClassSeries = {}
    for beta in table.classes:
        divisor = ChowElement.linear([-s.coefficient(beta.vector) for s in f])
        divisor = divisor - h.coefficient(beta.vector)
        if not divisor.is_zero():
            shift[beta] = HbarLaurent({-1: divisor})
    shifted = _class_mul(normalized, _class_exp(shift, classes, floor), classes, floor)

    multipliers = [series_exp(component) for component in f]
    inverse = [m.restrict(inside) for m in invert_substitution(multipliers)]
    terms: ClassSeries = {}
    for power in range(floor, 1):
        for monomial in CHOW_BASIS:
            component = series(
                (beta, value.coefficient(power).coefficient(monomial))
                for beta, value in shifted.items()
            )
            if component.is_zero():
                continue
            substituted = series_substitute(component, inverse).restrict(inside)
            for exponent, value in substituted.items():
                beta = ThreefoldClass.of(exponent)
                piece = HbarLaurent({power: ChowElement({monomial: value})})
                terms[beta] = terms.get(beta, HbarLaurent()) + piece
    J = JFunctionTable(classes=table.classes, terms=terms, hbar_depth=hbar_depth)
    return MirrorMap(F=F, f0=series_log(F), f=f, h=h, J=J, inverse=inverse)


@dataclass
class DegreeCheck:
    f_degree_zero: bool
    h_degree_one: bool
    homogeneous: bool

    @property
    def passed(self) -> bool:
        return self.f_degree_zero and self.h_degree_one and self.homogeneous


def mirror_map_degrees(table: IFunctionTable, solved: MirrorMap) -> DegreeCheck:
    """deg f_i = 0, deg h = 1 and the hbar-homogeneity of every I summand."""
    f_ok = all(exponent[2] == 0 for s in solved.f for exponent, _ in s.items())
    h_ok = all(exponent[2] == 1 for exponent, _ in solved.h.items())
    homogeneous = all(
        set(table.reduced[beta].coefficient(power).degrees()) <= {-power - beta.degree}
        for beta in table.classes
        for power in table.reduced[beta].powers()
    )
    return DegreeCheck(f_degree_zero=f_ok, h_degree_one=h_ok, homogeneous=homogeneous)


def extract_curve_count(
    J: JFunctionTable, beta: ThreefoldClass, normalization: str = "divisor"
) -> Fraction:
    """The H2-coefficient of the hbar^-2 part of the J-term of beta.

    ``raw`` returns the pairing of Eul * C_beta * H2 over the ambient space,
    ``divisor`` divides it by beta . H2.
    """
    if normalization not in ("divisor", "raw"):
        raise ValueError(f"Unknown pairing normalization {normalization!r}.")
    if beta not in J:
        raise ClassNotComputedError(f"The J-function was not computed at {beta}.")
    value = (EULER_CLASS * J[beta].coefficient(-2) * H2).pairing()
    if normalization == "raw":
        return value
    if not beta.b:
        raise I4MirrorError(f"The divisor normalization needs beta . H2 != 0, got {beta}.")
    return value / beta.b


def curve_count(beta: ThreefoldClass, normalization: str = "divisor") -> Fraction:
    """I-function on the box below beta, mirror map and extraction in one go."""
    table = i_function(box=beta)
    solved = mirror_map(table)
    count = extract_curve_count(solved.J, beta, normalization)
    logger.info("Curve count at %s (%s): %s", beta, normalization, count)
    return count


def bisection_class(degree: int) -> ThreefoldClass:
    """The threefold class (degree, 2, 0, 1) of the bisections of degree ``degree``."""
    return ThreefoldClass(degree, 2, 0, 1)


def to_wall_counts(
    bisections: Mapping[int, Rational],
    order: int,
    provenance: str = "derived",
) -> WallTable:
    """Wall table from the section series and the bisection counts.

    Nine sections meet D1, each with Bryan-Leung counts in the fibre direction.
    A bisection count on the threefold is four times the relative invariant.
    """
    sections = bryan_leung_series(order)
    walls = []
    for index in range(1, 10):
        for m in range(order + 1):
            count = sections.coefficient((m,))
            if count:
                walls.append(
                    WallDatum(
                        ray=RayRef(0),
                        tangency=1,
                        class_tag=f"E{index}",
                        count=count,
                        fibre_steps=m,
                        provenance="published",
                    )
                )
    for degree, value in sorted(bisections.items()):
        if degree > order:
            continue
        walls.append(
            WallDatum(
                ray=RayRef(0),
                tangency=2,
                class_tag=f"bisection-deg{degree}",
                count=Fraction(value) / 4,
                fibre_steps=degree,
                provenance=provenance,
            )
        )
    return WallTable(walls=walls)


def default_walls(order: int) -> WallTable:
    return to_wall_counts(PUBLISHED_BISECTION_COUNTS, order, provenance="published")
