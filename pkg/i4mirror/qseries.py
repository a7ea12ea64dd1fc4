"""Exact truncated series over integer exponent lattices.

Besides the truncated series this module provides the 24-dimensional quotient
ring Q[H1, H2, H3, H4]/(H1^3, H2^2, H3^2, H4^2) (:class:`ChowElement`) and
finite Laurent polynomials in hbar with coefficients in that ring
(:class:`HbarLaurent`), the layer the I- and J-function pipeline works in.

All coefficients are :class:`fractions.Fraction` values, no floating point is
involved anywhere in this module (apart from the informational minimal radius
reported by :func:`exp_bound_certify`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence, Union

from .exceptions import LatticeMismatchError, SeriesDomainError, TruncationError
from .utils import Rational, factorial, fraction_to_str, parse_fraction

__all__ = [
    "CHOW_BASIS",
    "TOP_CLASS",
    "CertificateReport",
    "ChowElement",
    "ExponentLattice",
    "HbarLaurent",
    "QSeries",
    "chow_exp",
    "chow_mul",
    "exp_bound_certify",
    "invert_substitution",
    "series_add",
    "series_exp",
    "series_inverse",
    "series_log",
    "series_mul",
    "series_pow",
    "series_substitute",
    "toolkit_bound",
]

logger = logging.getLogger(__name__)

Exponent = tuple[int, ...]
Coefficients = Union[Mapping[Sequence[int], Rational], Iterable[tuple[Sequence[int], Rational]]]


@dataclass(frozen=True)
class ExponentLattice:
    """Named integer lattice with a linear grading."""

    labels: tuple[str, ...]
    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if not self.labels:
            raise ValueError("An exponent lattice needs a positive rank.")
        if len(self.labels) != len(self.weights):
            raise ValueError(
                f"Got {len(self.labels)} labels but {len(self.weights)} grade weights."
            )
        if any(weight < 0 for weight in self.weights):
            raise ValueError(f"Grade weights must be nonnegative: {self.weights}")

    @classmethod
    def uniform(cls, *labels: str) -> ExponentLattice:
        """Lattice where every basis element has weight one."""
        return cls(labels=tuple(labels), weights=(1,) * len(labels))

    @property
    def rank(self) -> int:
        return len(self.labels)

    def grade(self, exponent: Sequence[int]) -> int:
        return sum(w * e for w, e in zip(self.weights, exponent))

    def zero(self) -> Exponent:
        return (0,) * self.rank

    def unit(self, label: str | int) -> Exponent:
        index = self.labels.index(label) if isinstance(label, str) else label
        return tuple(int(i == index) for i in range(self.rank))

    def check(self, exponent: Sequence[int]) -> Exponent:
        vector = tuple(int(e) for e in exponent)
        if len(vector) != self.rank:
            raise LatticeMismatchError(
                f"Exponent {vector} does not have rank {self.rank} ({self.labels})."
            )
        return vector

    def to_json(self) -> dict[str, Any]:
        return {"labels": list(self.labels), "weights": list(self.weights)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> ExponentLattice:
        return cls(labels=tuple(data["labels"]), weights=tuple(data["weights"]))


class QSeries:
    """Truncated formal series: a finite map from exponents to exact rationals.

    Terms whose grade exceeds the truncation order are discarded on
    construction and zero coefficients are never stored. Instances are
    immutable.
    """

    __slots__ = ("lattice", "truncation", "_terms")

    lattice: ExponentLattice
    truncation: int
    _terms: dict[Exponent, Fraction]

    def __init__(
        self, lattice: ExponentLattice, terms: Coefficients = (), truncation: int = 0
    ):
        if truncation < 0:
            raise TruncationError(f"Truncation order must be nonnegative: {truncation}")
        items = terms.items() if isinstance(terms, Mapping) else terms
        accumulated: dict[Exponent, Fraction] = {}
        for exponent, coefficient in items:
            vector = lattice.check(exponent)
            if lattice.grade(vector) > truncation:
                continue
            accumulated[vector] = accumulated.get(vector, Fraction(0)) + Fraction(
                coefficient
            )
        self._init(lattice, accumulated, truncation)

    def _init(
        self, lattice: ExponentLattice, terms: dict[Exponent, Fraction], truncation: int
    ) -> None:
        object.__setattr__(self, "lattice", lattice)
        object.__setattr__(self, "truncation", truncation)
        object.__setattr__(self, "_terms", {e: c for e, c in terms.items() if c})

    @classmethod
    def _from_normalized(
        cls, lattice: ExponentLattice, terms: dict[Exponent, Fraction], truncation: int
    ) -> QSeries:
        # Skips the rank and grade checks, callers guarantee both.
        instance = cls.__new__(cls)
        instance._init(lattice, terms, truncation)
        return instance

    def __setattr__(self, name: str, value: Any) -> None:
        raise AttributeError(f"{type(self).__name__} is immutable.")

    @classmethod
    def zero(cls, lattice: ExponentLattice, truncation: int) -> QSeries:
        return cls(lattice, (), truncation)

    @classmethod
    def constant(
        cls, lattice: ExponentLattice, value: Rational, truncation: int
    ) -> QSeries:
        return cls(lattice, {lattice.zero(): value}, truncation)

    @classmethod
    def one(cls, lattice: ExponentLattice, truncation: int) -> QSeries:
        return cls.constant(lattice, 1, truncation)

    @classmethod
    def monomial(
        cls,
        lattice: ExponentLattice,
        exponent: Sequence[int],
        truncation: int,
        coefficient: Rational = 1,
    ) -> QSeries:
        return cls(lattice, {tuple(exponent): coefficient}, truncation)

    @property
    def terms(self) -> Mapping[Exponent, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Exponent, Fraction]]:
        """Terms sorted lexicographically by exponent."""
        return sorted(self._terms.items())

    def __iter__(self) -> Iterator[tuple[Exponent, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, exponent: Sequence[int]) -> Fraction:
        return self._terms.get(tuple(exponent), Fraction(0))

    @property
    def constant_term(self) -> Fraction:
        return self.coefficient(self.lattice.zero())

    def grades(self) -> list[int]:
        return sorted({self.lattice.grade(e) for e in self._terms})

    def min_grade(self) -> int | None:
        return min((self.lattice.grade(e) for e in self._terms), default=None)

    def truncate(self, order: int) -> QSeries:
        order = min(order, self.truncation)
        if order < 0:
            raise TruncationError(f"Truncation order must be nonnegative: {order}")
        grade = self.lattice.grade
        return QSeries._from_normalized(
            self.lattice,
            {e: c for e, c in self._terms.items() if grade(e) <= order},
            order,
        )

    def restrict(self, predicate: Callable[[Exponent], bool]) -> QSeries:
        """Keep only the terms whose exponent satisfies the predicate."""
        return QSeries._from_normalized(
            self.lattice,
            {e: c for e, c in self._terms.items() if predicate(e)},
            self.truncation,
        )

    def map_exponents(
        self,
        function: Callable[[Exponent], Sequence[int]],
        lattice: ExponentLattice,
        truncation: int | None = None,
    ) -> QSeries:
        """Push the series forward along a map of exponent lattices."""
        return QSeries(
            lattice,
            ((function(e), c) for e, c in self._terms.items()),
            self.truncation if truncation is None else truncation,
        )

    def scale(self, factor: Rational) -> QSeries:
        factor = Fraction(factor)
        return QSeries._from_normalized(
            self.lattice,
            {e: c * factor for e, c in self._terms.items()},
            self.truncation,
        )

    def shift(self, exponent: Sequence[int]) -> QSeries:
        """Multiply by the monomial with the given exponent."""
        offset = self.lattice.check(exponent)
        return QSeries(
            self.lattice,
            ((tuple(a + b for a, b in zip(e, offset)), c) for e, c in self._terms.items()),
            self.truncation,
        )

    def _coerce(self, other: Any) -> QSeries | None:
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries.constant(self.lattice, other, self.truncation)
        return None

    def __add__(self, other: Any) -> QSeries:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return series_add(self, coerced)

    __radd__ = __add__

    def __neg__(self) -> QSeries:
        return self.scale(-1)

    def __sub__(self, other: Any) -> QSeries:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return series_add(self, -coerced)

    def __rsub__(self, other: Any) -> QSeries:
        coerced = self._coerce(other)
        if coerced is None:
            return NotImplemented
        return series_add(coerced, -self)

    def __mul__(self, other: Any) -> QSeries:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, QSeries):
            return series_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> QSeries:
        return series_pow(self, exponent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.lattice != other.lattice:
            return False
        order = min(self.truncation, other.truncation)
        return self.truncate(order)._terms == other.truncate(order)._terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"QSeries({self}, truncation={self.truncation})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exponent, coefficient in self.items():
            monomial = "*".join(
                f"{label}^{power}" if power != 1 else label
                for label, power in zip(self.lattice.labels, exponent)
                if power
            )
            if not monomial:
                parts.append(fraction_to_str(coefficient))
            elif coefficient == 1:
                parts.append(monomial)
            else:
                parts.append(f"{fraction_to_str(coefficient)}*{monomial}")
        return " + ".join(parts)

    def to_json(self) -> dict[str, Any]:
        return {
            "lattice": self.lattice.to_json(),
            "truncation": self.truncation,
            "terms": [
                {"exp": list(exponent), "coeff": fraction_to_str(coefficient)}
                for exponent, coefficient in self.items()
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> QSeries:
        return cls(
            ExponentLattice.from_json(data["lattice"]),
            ((term["exp"], parse_fraction(term["coeff"])) for term in data["terms"]),
            int(data["truncation"]),
        )

    def to_rows(self) -> list[tuple[Any, ...]]:
        """Flatten into (exponent..., numerator, denominator) rows."""
        return [
            (*exponent, coefficient.numerator, coefficient.denominator)
            for exponent, coefficient in self.items()
        ]


def _check_same_lattice(a: QSeries, b: QSeries) -> None:
    if a.lattice != b.lattice:
        raise LatticeMismatchError(
            f"Cannot combine series over {a.lattice.labels} and {b.lattice.labels}."
        )


def series_add(a: QSeries, b: QSeries) -> QSeries:
    _check_same_lattice(a, b)
    truncation = min(a.truncation, b.truncation)
    grade = a.lattice.grade
    terms: dict[Exponent, Fraction] = {}
    for source in (a, b):
        for exponent, coefficient in source._terms.items():
            if grade(exponent) <= truncation:
                terms[exponent] = terms.get(exponent, Fraction(0)) + coefficient
    return QSeries._from_normalized(a.lattice, terms, truncation)


def _product_truncation(a: QSeries, b: QSeries) -> int:
    # Terms of negative grade lower the order up to which a product is exact.
    truncation = min(a.truncation, b.truncation)
    low_a, low_b = a.min_grade(), b.min_grade()
    if low_a is not None and low_a < 0:
        truncation = min(truncation, b.truncation + low_a)
    if low_b is not None and low_b < 0:
        truncation = min(truncation, a.truncation + low_b)
    if truncation < 0:
        raise TruncationError("The product of these series is not determined at any order.")
    return truncation


def series_mul(
    a: QSeries, b: QSeries, keep: Callable[[Exponent], bool] | None = None
) -> QSeries:
    """Cauchy product truncated by grade.

    The optional ``keep`` predicate drops product exponents early, which is
    exact whenever the kept set is closed under taking smaller exponents.
    """
    _check_same_lattice(a, b)
    truncation = _product_truncation(a, b)
    grade = a.lattice.grade
    right = sorted((grade(e), e, c) for e, c in b._terms.items())
    terms: dict[Exponent, Fraction] = {}
    for left_exponent, left_coefficient in a._terms.items():
        left_grade = grade(left_exponent)
        for right_grade, right_exponent, right_coefficient in right:
            if left_grade + right_grade > truncation:
                break
            exponent = tuple(x + y for x, y in zip(left_exponent, right_exponent))
            if keep is not None and not keep(exponent):
                continue
            terms[exponent] = (
                terms.get(exponent, Fraction(0)) + left_coefficient * right_coefficient
            )
    return QSeries._from_normalized(a.lattice, terms, truncation)


def _require_positive_grade(a: QSeries, what: str) -> int:
    """Return the minimal grade of a series whose terms all have positive grade."""
    grade = a.lattice.grade
    low = a.min_grade()
    if low is not None and low <= 0:
        offending = sorted(e for e in a._terms if grade(e) <= 0)
        raise SeriesDomainError(
            f"{what} requires every term to have positive grade, "
            f"found exponents {offending}."
        )
    return low or 1


def _power_sum(
    base: QSeries, coefficients: Callable[[int], Fraction], start: QSeries
) -> QSeries:
    """Evaluate start + sum_{n>=1} coefficients(n) * base^n for a positive-grade base."""
    low = _require_positive_grade(base, "A power series in a")
    result = start
    power = QSeries.one(base.lattice, base.truncation)
    for n in range(1, base.truncation // low + 1):
        power = series_mul(power, base)
        if power.is_zero():
            break
        result = result + power.scale(coefficients(n))
    return result


def series_exp(a: QSeries) -> QSeries:
    if a.constant_term:
        raise SeriesDomainError(
            f"Cannot exponentiate a series with constant term {a.constant_term}."
        )
    _require_positive_grade(a, "The exponential")
    return _power_sum(
        a, lambda n: Fraction(1, factorial(n)), QSeries.one(a.lattice, a.truncation)
    )


def series_log(a: QSeries) -> QSeries:
    if a.constant_term != 1:
        raise SeriesDomainError(
            f"The logarithm needs constant term 1, got {a.constant_term}."
        )
    return _power_sum(
        a - 1, lambda n: Fraction((-1) ** (n + 1), n), QSeries.zero(a.lattice, a.truncation)
    )


def series_inverse(a: QSeries) -> QSeries:
    constant = a.constant_term
    if not constant:
        raise SeriesDomainError("Cannot invert a series with zero constant term.")
    rest = a.scale(1 / constant) - 1
    _require_positive_grade(rest, "The inverse")
    geometric = _power_sum(
        rest, lambda n: Fraction((-1) ** n), QSeries.one(a.lattice, a.truncation)
    )
    return geometric.scale(1 / constant)


def series_pow(a: QSeries, n: int) -> QSeries:
    """Integer power by repeated squaring, negative powers require a unit."""
    if n < 0:
        return series_pow(series_inverse(a), -n)
    result = QSeries.one(a.lattice, a.truncation)
    base = a
    while n:
        if n & 1:
            result = series_mul(result, base)
        n >>= 1
        if n:
            base = series_mul(base, base)
    return result


def _check_unit(multiplier: QSeries, index: int) -> None:
    if not multiplier.constant_term:
        raise SeriesDomainError(
            f"Substitution multiplier {index} is not a unit (zero constant term)."
        )
    _require_positive_grade(multiplier - multiplier.constant_term, "A unit multiplier")


def series_substitute(a: QSeries, subs: Sequence[QSeries]) -> QSeries:
    """Apply x_i -> x_i * subs[i] to every monomial of ``a``."""
    if len(subs) != a.lattice.rank:
        raise LatticeMismatchError(
            f"Expected {a.lattice.rank} substitution multipliers, got {len(subs)}."
        )
    for index, multiplier in enumerate(subs):
        _check_same_lattice(a, multiplier)
        _check_unit(multiplier, index)
    truncation = min([a.truncation, *(s.truncation for s in subs)])
    grade = a.lattice.grade
    powers: dict[tuple[int, int], QSeries] = {}

    def power(index: int, n: int) -> QSeries:
        if (index, n) not in powers:
            powers[(index, n)] = series_pow(subs[index].truncate(truncation), n)
        return powers[(index, n)]

    result = QSeries.zero(a.lattice, truncation)
    for exponent, coefficient in a._terms.items():
        remaining = truncation - grade(exponent)
        if remaining < 0:
            continue
        factor = QSeries.constant(a.lattice, coefficient, remaining)
        for index, n in enumerate(exponent):
            if n:
                factor = series_mul(factor, power(index, n).truncate(remaining))
        result = result + QSeries(
            a.lattice,
            (
                (tuple(x + y for x, y in zip(e, exponent)), c)
                for e, c in factor._terms.items()
            ),
            truncation,
        )
    return result


def invert_substitution(multipliers: Sequence[QSeries]) -> list[QSeries]:
    """Multipliers of the inverse of the substitution x_i -> x_i * g_i(x).

    Solves h = 1 / g(x * h) by fixed point iteration, every pass fixes the
    coefficients of one more grade.
    """
    if not multipliers:
        return []
    for index, multiplier in enumerate(multipliers):
        _check_unit(multiplier, index)
    lattice = multipliers[0].lattice
    truncation = min(m.truncation for m in multipliers)
    inverse = [
        QSeries.constant(lattice, 1 / m.constant_term, truncation) for m in multipliers
    ]
    for step in range(truncation + 1):
        updated = [series_inverse(series_substitute(m, inverse)) for m in multipliers]
        if updated == inverse:
            logger.debug("Substitution inverse converged after %d passes.", step + 1)
            break
        inverse = updated
    return inverse


@dataclass
class CertificateReport:
    """Outcome of checking |a_v| <= c * r^diag(v) coefficientwise."""

    c: Fraction
    r: Fraction
    checked: int = 0
    failures: list[tuple[Exponent, Fraction, Fraction]] = field(default_factory=list)
    minimal_r: float | None = None

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict[str, Any]:
        return {
            "c": fraction_to_str(self.c),
            "r": fraction_to_str(self.r),
            "checked": self.checked,
            "passed": self.passed,
            "minimal_r": self.minimal_r,
            "failures": [
                {
                    "exp": list(exponent),
                    "coeff": fraction_to_str(coefficient),
                    "bound": fraction_to_str(bound),
                }
                for exponent, coefficient, bound in self.failures
            ],
        }


def diag(exponent: Sequence[int]) -> int:
    return sum(e + 1 for e in exponent)


#: Largest argument of math.exp that stays finite.
_MAX_EXP = 709.0


def _log(value: Fraction) -> float:
    # math.log takes big integers exactly, a huge Fraction would overflow as a float.
    return math.log(value.numerator) - math.log(value.denominator)


def exp_bound_certify(
    source: QSeries | Coefficients, c: Rational, r: Rational
) -> CertificateReport:
    """Check the exponential bound |a_v| <= c * r^diag(v) on every coefficient.

    ``source`` is a series or any table of (exponent, coefficient) pairs, the
    same exponent may occur several times (e.g. one entry per Chow component).
    The report also carries the smallest r for which the given c would pass.
    """
    if isinstance(source, QSeries):
        entries: Iterable[tuple[Sequence[int], Rational]] = source._terms.items()
    elif isinstance(source, Mapping):
        entries = source.items()
    else:
        entries = source
    report = CertificateReport(c=Fraction(c), r=Fraction(r))
    for exponent, coefficient in entries:
        coefficient = Fraction(coefficient)
        if not coefficient:
            continue
        report.checked += 1
        size = diag(exponent)
        bound = report.c * report.r**size
        if abs(coefficient) > bound:
            report.failures.append((tuple(exponent), coefficient, bound))
        if size > 0 and report.c > 0:
            log_needed = (_log(abs(coefficient)) - _log(report.c)) / size
            needed = math.exp(log_needed) if log_needed < _MAX_EXP else math.inf
            report.minimal_r = max(report.minimal_r or 0.0, needed)
    logger.debug(
        "Certified %d coefficients at c=%s, r=%s: %d failures.",
        report.checked,
        report.c,
        report.r,
        len(report.failures),
    )
    return report


def toolkit_bound(
    operation: str,
    *bounds: tuple[Rational, Rational],
    rank: int,
    constant: Rational | None = None,
) -> tuple[Fraction, Fraction]:
    """Explicit (c', r') for the result of a holomorphic toolkit operation.

    The inputs are certified bounds (c, r) of the operands over a lattice of
    the given rank with nonnegative exponents. Supported operations are
    ``product`` (two bounds), ``inverse`` (one bound, the constant term must
    be given), ``exp`` (one bound of a series without constant term) and
    ``substitute`` (the bound of the series, then one bound covering all
    multipliers). The constants come from majorizing every operand by
    C / (1 - r * (x_1 + ... + x_n)) with C = c * r^n.
    """
    normalized = [(Fraction(c), max(Fraction(r), Fraction(1))) for c, r in bounds]
    n = rank

    def big(c: Fraction, r: Fraction) -> Fraction:
        return c * r**n

    if operation == "product":
        (c1, r1), (c2, r2) = normalized
        radius = max(r1, r2)
        return big(c1, radius) * big(c2, radius), 2 * radius * n
    if operation == "inverse":
        ((c1, r1),) = normalized
        if not constant:
            raise SeriesDomainError("The inverse bound needs a nonzero constant term.")
        scale = 1 / abs(Fraction(constant))
        return scale, r1 * n * (1 + big(c1, r1) * scale)
    if operation == "exp":
        ((c1, r1),) = normalized
        # Cauchy estimate of exp(C u / (1 - u)) on the circle |u| = 1 / (C + 1).
        return Fraction(3), r1 * n * (big(c1, r1) + 1)
    if operation == "substitute":
        (ca, ra), (cf, rf) = normalized
        return big(ca, ra), n * (rf + ra * big(cf, rf))
    raise ValueError(f"Unknown toolkit operation: {operation!r}")


ChowMonomial = tuple[int, int, int, int]

CHOW_RELATIONS: ChowMonomial = (3, 2, 2, 2)
CHOW_BASIS: tuple[ChowMonomial, ...] = tuple(
    product(*(range(bound) for bound in CHOW_RELATIONS))  # type: ignore[misc]
)
TOP_CLASS: ChowMonomial = (2, 1, 1, 1)
_GENERATOR_NAMES = ("H1", "H2", "H3", "H4")


def _chow_degree(monomial: Sequence[int]) -> int:
    return sum(monomial)


class ChowElement:
    """Element of Q[H1..H4]/(H1^3, H2^2, H3^2, H4^2)."""

    __slots__ = ("_coefficients",)

    _coefficients: dict[ChowMonomial, Fraction]

    def __init__(self, coefficients: Coefficients = ()):
        items = coefficients.items() if isinstance(coefficients, Mapping) else coefficients
        accumulated: dict[ChowMonomial, Fraction] = {}
        for monomial, value in items:
            key = tuple(int(e) for e in monomial)
            if len(key) != 4 or any(e < 0 for e in key):
                raise ValueError(f"Not a monomial in H1..H4: {monomial}")
            if any(e >= bound for e, bound in zip(key, CHOW_RELATIONS)):
                continue
            accumulated[key] = accumulated.get(key, Fraction(0)) + Fraction(value)  # type: ignore[index]
        self._coefficients = {m: c for m, c in accumulated.items() if c}

    @classmethod
    def _wrap(cls, coefficients: dict[ChowMonomial, Fraction]) -> ChowElement:
        element = cls.__new__(cls)
        element._coefficients = {m: c for m, c in coefficients.items() if c}
        return element

    @classmethod
    def zero(cls) -> ChowElement:
        return cls()

    @classmethod
    def scalar(cls, value: Rational) -> ChowElement:
        return cls({(0, 0, 0, 0): value})

    @classmethod
    def one(cls) -> ChowElement:
        return cls.scalar(1)

    @classmethod
    def generator(cls, index: int) -> ChowElement:
        """The class H_index, index counted from 1."""
        if not 1 <= index <= 4:
            raise ValueError(f"There are four generators H1..H4, got index {index}.")
        return cls({tuple(int(i == index - 1) for i in range(4)): 1})

    @classmethod
    def linear(cls, coefficients: Sequence[Rational]) -> ChowElement:
        """The divisor class sum_i coefficients[i] * H_{i+1}."""
        return cls(
            (tuple(int(i == j) for i in range(4)), c) for j, c in enumerate(coefficients)
        )

    def coefficient(self, monomial: Sequence[int]) -> Fraction:
        return self._coefficients.get(tuple(monomial), Fraction(0))  # type: ignore[arg-type]

    @property
    def constant(self) -> Fraction:
        return self.coefficient((0, 0, 0, 0))

    def pairing(self) -> Fraction:
        """Coefficient of the top class H1^2 H2 H3 H4."""
        return self.coefficient(TOP_CLASS)

    def homogeneous_part(self, degree: int) -> ChowElement:
        return ChowElement._wrap(
            {m: c for m, c in self._coefficients.items() if _chow_degree(m) == degree}
        )

    def degrees(self) -> list[int]:
        return sorted({_chow_degree(m) for m in self._coefficients})

    def items(self) -> list[tuple[ChowMonomial, Fraction]]:
        return sorted(self._coefficients.items())

    def is_zero(self) -> bool:
        return not self._coefficients

    def __bool__(self) -> bool:
        return bool(self._coefficients)

    def scale(self, factor: Rational) -> ChowElement:
        factor = Fraction(factor)
        return ChowElement._wrap({m: c * factor for m, c in self._coefficients.items()})

    def __add__(self, other: Any) -> ChowElement:
        if isinstance(other, (int, Fraction)):
            other = ChowElement.scalar(other)
        if not isinstance(other, ChowElement):
            return NotImplemented
        terms = dict(self._coefficients)
        for monomial, value in other._coefficients.items():
            terms[monomial] = terms.get(monomial, Fraction(0)) + value
        return ChowElement._wrap(terms)

    __radd__ = __add__

    def __neg__(self) -> ChowElement:
        return self.scale(-1)

    def __sub__(self, other: Any) -> ChowElement:
        if isinstance(other, (int, Fraction)):
            other = ChowElement.scalar(other)
        if not isinstance(other, ChowElement):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: Any) -> ChowElement:
        return (-self) + other

    def __mul__(self, other: Any) -> ChowElement:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, ChowElement):
            return chow_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> ChowElement:
        if exponent < 0:
            raise SeriesDomainError("Negative powers are not defined in a nilpotent ring.")
        result = ChowElement.one()
        for _ in range(exponent):
            result = chow_mul(result, self)
        return result

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = ChowElement.scalar(other)
        if not isinstance(other, ChowElement):
            return NotImplemented
        return self._coefficients == other._coefficients

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._coefficients.items())))

    def __repr__(self) -> str:
        return f"ChowElement({self})"

    def __str__(self) -> str:
        if not self._coefficients:
            return "0"
        return " + ".join(
            f"{fraction_to_str(c)}*{name}" if name else fraction_to_str(c)
            for name, c in ((_monomial_name(m), c) for m, c in self.items())
        )

    def to_json(self) -> dict[str, str]:
        return {_monomial_name(m) or "1": fraction_to_str(c) for m, c in self.items()}


def _monomial_name(monomial: Sequence[int]) -> str:
    return "*".join(
        f"{name}^{power}" if power > 1 else name
        for name, power in zip(_GENERATOR_NAMES, monomial)
        if power
    )


def chow_mul(a: ChowElement, b: ChowElement) -> ChowElement:
    terms: dict[ChowMonomial, Fraction] = {}
    for left, x in a._coefficients.items():
        for right, y in b._coefficients.items():
            monomial = (
                left[0] + right[0],
                left[1] + right[1],
                left[2] + right[2],
                left[3] + right[3],
            )
            if (
                monomial[0] >= 3
                or monomial[1] >= 2
                or monomial[2] >= 2
                or monomial[3] >= 2
            ):
                continue
            terms[monomial] = terms.get(monomial, Fraction(0)) + x * y
    return ChowElement._wrap(terms)


def chow_exp(a: ChowElement) -> ChowElement:
    """Exponential of a nilpotent element (zero scalar part)."""
    if a.constant:
        raise SeriesDomainError("Only nilpotent elements can be exponentiated exactly.")
    result = ChowElement.one()
    power = ChowElement.one()
    for n in range(1, _chow_degree(TOP_CLASS) + 1):
        power = chow_mul(power, a)
        if power.is_zero():
            break
        result = result + power.scale(Fraction(1, factorial(n)))
    return result


class HbarLaurent:
    """Finite Laurent polynomial in hbar with :class:`ChowElement` coefficients.

    Arithmetic is exact, every power between the minimal and the maximal
    stored power is kept. Use :meth:`truncate_below` to drop powers explicitly.
    """

    __slots__ = ("_terms",)

    _terms: dict[int, ChowElement]

    def __init__(self, terms: Mapping[int, ChowElement] | None = None):
        self._terms = {int(p): c for p, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def from_graded(cls, element: ChowElement, shift: int = 0) -> HbarLaurent:
        """Place the degree-k part of ``element`` at hbar^(shift - k)."""
        return cls({shift - k: element.homogeneous_part(k) for k in element.degrees()})

    @classmethod
    def constant(cls, element: ChowElement) -> HbarLaurent:
        return cls({0: element})

    @property
    def min_power(self) -> int | None:
        return min(self._terms, default=None)

    @property
    def max_power(self) -> int | None:
        return max(self._terms, default=None)

    def powers(self) -> list[int]:
        return sorted(self._terms)

    def coefficient(self, power: int) -> ChowElement:
        return self._terms.get(power, ChowElement.zero())

    def is_zero(self) -> bool:
        return not self._terms

    def truncate_below(self, power: int) -> HbarLaurent:
        return HbarLaurent({p: c for p, c in self._terms.items() if p >= power})

    def __add__(self, other: Any) -> HbarLaurent:
        if not isinstance(other, HbarLaurent):
            return NotImplemented
        terms = dict(self._terms)
        for power, value in other._terms.items():
            terms[power] = terms.get(power, ChowElement.zero()) + value
        return HbarLaurent(terms)

    def __neg__(self) -> HbarLaurent:
        return HbarLaurent({p: -c for p, c in self._terms.items()})

    def __sub__(self, other: Any) -> HbarLaurent:
        if not isinstance(other, HbarLaurent):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: Any) -> HbarLaurent:
        if isinstance(other, (int, Fraction, ChowElement)):
            return HbarLaurent({p: c * other for p, c in self._terms.items()})
        if not isinstance(other, HbarLaurent):
            return NotImplemented
        terms: dict[int, ChowElement] = {}
        for p, x in self._terms.items():
            for q, y in other._terms.items():
                terms[p + q] = terms.get(p + q, ChowElement.zero()) + chow_mul(x, y)
        return HbarLaurent(terms)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HbarLaurent):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        inner = ", ".join(f"hbar^{p}: {self._terms[p]}" for p in self.powers())
        return f"HbarLaurent({{{inner}}})"

    def to_json(self) -> dict[str, dict[str, str]]:
        return {str(p): self._terms[p].to_json() for p in self.powers()}
