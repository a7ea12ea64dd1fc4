"""Broken lines and pairs of pants on the universal cover of the base.

A broken line comes in from infinity parallel to an integral point (k, 1),
travels against its carried direction and may bend where it crosses a wall,
multiplying in a term of the wall function. Two broken lines ending at the
same generic point near R with carried directions summing to R form a pair
of pants and contribute to the structure constant of theta_P * theta_Q at
theta_R.

Every candidate pair is produced from a window that is derived from the
grade of its phi-exponent, then confirmed by tracing it backwards through
the cover in exact arithmetic (the endpoint carries an infinitesimal side
flag so that endpoints on a ray are still generic).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from ..affine import PLValue, cone_of, phi
from ..exceptions import EffectivityError, InvariantViolation, TruncationError
from ..qseries import QSeries, series_mul
from .walls import WallTable

__all__ = [
    "SHAPES",
    "TARGETS",
    "Bend",
    "BrokenLine",
    "Endpoint",
    "PairOfPants",
    "closed_form_unbent",
    "enumerate_pairs",
    "theta_label",
    "theta_product_coefficients",
]

logger = logging.getLogger(__name__)

Direction = tuple[int, int]
Step = tuple[Direction, int]
LineSpec = tuple[Direction, tuple[Step, ...]]

SHAPES = ("unbent", "one-bend", "tangency-two", "both-bend", "bend-twice")

#: Representatives of the integral points of the base at height at most two.
TARGETS: tuple[Direction, ...] = (
    *((x, 2) for x in range(8)),
    *((x, 1) for x in range(4)),
    (0, 0),
)


def theta_label(target: Sequence[int], offset: int = 0) -> str:
    """Name of the theta function at a target point, e.g. '2D2' for (2, 2)."""
    x, y = int(target[0]), int(target[1])
    if y == 0:
        return "1"
    if y == 1:
        return f"D{(x - offset) % 4 + 1}"
    if x % 2 == 0:
        return f"2D{(x // 2 - offset) % 4 + 1}"
    first = ((x - 1) // 2 - offset) % 4 + 1
    return f"D{first}+D{first % 4 + 1}"


@dataclass(frozen=True)
class _Infinitesimal:
    """The number value + slope * eps for a positive infinitesimal eps."""

    value: Fraction
    slope: Fraction = Fraction(0)

    def __add__(self, other: _Infinitesimal) -> _Infinitesimal:
        return _Infinitesimal(self.value + other.value, self.slope + other.slope)

    def __sub__(self, other: _Infinitesimal) -> _Infinitesimal:
        return _Infinitesimal(self.value - other.value, self.slope - other.slope)

    def scale(self, factor: int | Fraction) -> _Infinitesimal:
        return _Infinitesimal(self.value * factor, self.slope * factor)

    def sign(self) -> int:
        if self.value:
            return 1 if self.value > 0 else -1
        if self.slope:
            return 1 if self.slope > 0 else -1
        return 0


@dataclass(frozen=True)
class Endpoint:
    """Generic endpoint (x_hat + side * eps, 1) of a pair of broken lines."""

    x_hat: Fraction
    side: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_hat", Fraction(self.x_hat))
        if self.side not in (1, -1):
            raise ValueError(f"The side flag is +1 or -1, got {self.side}.")

    @classmethod
    def near(
        cls, target: Sequence[int], side: int = 1, origin_slope: Fraction = Fraction(1, 3)
    ) -> Endpoint:
        """Default endpoint for a target: on its ray, or inside the cone C for 0."""
        x, y = int(target[0]), int(target[1])
        if y == 0:
            return cls(Fraction(origin_slope), side)
        return cls(Fraction(x, y), side)

    def position(self) -> tuple[_Infinitesimal, _Infinitesimal]:
        return (_Infinitesimal(self.x_hat, Fraction(self.side)), _Infinitesimal(Fraction(1)))


def _trace(
    direction: Direction, steps: Sequence[Step], endpoint: Endpoint
) -> list[tuple[int, tuple[_Infinitesimal, _Infinitesimal]]] | None:
    """Trace a broken line backwards from its endpoint.

    Returns, in time order, the power of the wall function used at every bend
    together with the bend point, or None when the bends cannot be realized.
    """
    ux = direction[0] - sum(degree * ray[0] for ray, degree in steps)
    uy = direction[1] - sum(degree * ray[1] for ray, degree in steps)
    px, py = endpoint.position()
    result = []
    for (rx, ry), degree in reversed(steps):
        denominator = ux * ry - rx * uy
        if denominator == 0:
            return None
        s = (py.scale(rx) - px.scale(ry)).scale(Fraction(1, denominator))
        if s.sign() <= 0:
            return None
        px, py = px + s.scale(ux), py + s.scale(uy)
        if py.sign() <= 0:
            return None
        ux, uy = ux + degree * rx, uy + degree * ry
        result.append((abs(rx * uy - ry * ux), (px, py)))
    result.reverse()
    return result


def _phi_at(point: Direction) -> PLValue:
    if point[1] == 0:
        if point[0]:
            raise ValueError(f"{point} is not a point of the base.")
        return PLValue.zero()
    return phi(point)


@dataclass(frozen=True)
class Bend:
    ray: Direction
    degree: int
    power: int
    coefficient: QSeries


@dataclass(frozen=True)
class BrokenLine:
    """A broken line with its bends in time order."""

    direction: Direction
    bends: tuple[Bend, ...]
    endpoint: Endpoint

    @property
    def carried_directions(self) -> list[Direction]:
        """Direction of the carried exponent on every linear segment."""
        current = self.direction
        directions = [current]
        for bend in self.bends:
            current = (
                current[0] - bend.degree * bend.ray[0],
                current[1] - bend.degree * bend.ray[1],
            )
            directions.append(current)
        return directions

    @property
    def final_direction(self) -> Direction:
        return self.carried_directions[-1]

    @property
    def velocity_grades(self) -> list[int]:
        """y-grade of the velocity, which is minus the carried direction."""
        return [-y for _, y in self.carried_directions]

    def phi_part(self) -> PLValue:
        value = phi(self.direction)
        for bend in self.bends:
            value = value - phi(bend.ray) * bend.degree
        return value

    def coefficient(self, truncation: int) -> QSeries | None:
        if not self.bends:
            return None
        result = self.bends[0].coefficient
        for bend in self.bends[1:]:
            result = series_mul(result, bend.coefficient)
        return result.truncate(truncation)

    def check_invariants(self) -> None:
        grades = self.velocity_grades
        if any(b < a for a, b in zip(grades, grades[1:])):
            raise InvariantViolation(
                "monotone-carried-grade",
                f"velocity grades {grades} along the line from {self.direction}",
            )

    def vertices(self, extent: float = 3.0) -> list[tuple[float, float]]:
        """Polyline in time order, starting ``extent`` units before the first bend."""
        steps = [(bend.ray, bend.degree) for bend in self.bends]
        traced = _trace(self.direction, steps, self.endpoint) or []
        points = [(float(px.value), float(py.value)) for _, (px, py) in traced]
        end = (float(self.endpoint.x_hat), 1.0)
        start = points[0] if points else end
        far = (start[0] + extent * self.direction[0], start[1] + extent * self.direction[1])
        return [far, *points, end]

    def cells(self) -> list[int]:
        """Start indices of the maximal cones containing the bend points."""
        steps = [(bend.ray, bend.degree) for bend in self.bends]
        traced = _trace(self.direction, steps, self.endpoint) or []
        return [cone_of((px.value, py.value)).start for _, (px, py) in traced]


@dataclass(frozen=True)
class PairOfPants:
    first: BrokenLine
    second: BrokenLine
    target: Direction
    shape: str
    contribution: QSeries

    @property
    def bend_count(self) -> int:
        return len(self.first.bends) + len(self.second.bends)

    def phi_exponent(self) -> PLValue:
        return self.first.phi_part() + self.second.phi_part() - _phi_at(self.target)


def _ordered(
    bending: LineSpec, other: LineSpec, p: int, q: int
) -> Iterator[tuple[LineSpec, LineSpec]]:
    """Both assignments of two line specs to the residues p (first) and q (second)."""
    if bending[0][0] % 4 == p and other[0][0] % 4 == q:
        yield bending, other
    if bending[0][0] % 4 == q and other[0][0] % 4 == p:
        yield other, bending


def _candidates(
    p: int, q: int, target: Direction, x_hat: Fraction, truncation: int
) -> Iterator[tuple[LineSpec, LineSpec, str]]:
    """All pairs of line specs whose phi-exponent can have grade <= truncation."""
    x, y = target
    root = math.isqrt(truncation) + 2
    if y == 2:
        center = Fraction(x, 2)
        for a in range(math.floor(center) - root - 1, math.ceil(center) + root + 2):
            b = x - a
            if a % 4 == p and b % 4 == q:
                yield ((a, 1), ()), ((b, 1), ()), "unbent"
    elif y == 1:
        # The bending line from a turns at ray k, the other line b is straight;
        # d1 = a - k and d2 = k - b have the same sign and |d2| >= |d1|.
        for d1 in range(-truncation, truncation + 1):
            if not d1:
                continue
            sign = 1 if d1 > 0 else -1
            for size in range(abs(d1), truncation // abs(d1) + 1):
                d2 = sign * size
                k = x - d1 + d2
                bending = ((k + d1, 1), (((k, 1), 1),))
                straight = ((k - d2, 1), ())
                for first, second in _ordered(bending, straight, p, q):
                    yield first, second, "one-bend"
    elif y == 0:
        low, high = math.floor(x_hat) - root - 1, math.ceil(x_hat) + root + 1
        for other in range(low, high + 1):
            straight = ((other, 1), ())
            for k in range(other - root, other + root + 1):
                if k != other:
                    bending = ((2 * k - other, 1), (((k, 1), 2),))
                    for first, second in _ordered(bending, straight, p, q):
                        yield first, second, "tangency-two"
            for k in range(2 * other - 2 * root - 1, 2 * other + 2 * root + 2):
                if k % 2:
                    bending = ((k - other, 1), (((k, 2), 1),))
                    for first, second in _ordered(bending, straight, p, q):
                        yield first, second, "tangency-two"
            for e in range(-root, root + 1):
                if not e:
                    continue
                sign = 1 if e > 0 else -1
                ka = other + e
                for size in range(1, (truncation - e * e) // abs(e) + 1):
                    kb = ka + sign * size
                    bending = ((ka + kb - other, 1), (((kb, 1), 1), ((ka, 1), 1)))
                    for first, second in _ordered(bending, straight, p, q):
                        yield first, second, "bend-twice"
        for d in range(-root, root + 1):
            if not d:
                continue
            sign = 1 if d > 0 else -1
            for k1 in range(math.floor(x_hat) - truncation - 1, math.ceil(x_hat) + truncation + 2):
                for size in range(1, (truncation - d * d) // abs(d) + 1):
                    k2 = k1 - sign * size
                    first = ((k1 + d, 1), (((k1, 1), 1),))
                    second = ((k2 - d, 1), (((k2, 1), 1),))
                    if first[0][0] % 4 == p and second[0][0] % 4 == q:
                        yield first, second, "both-bend"


def _spec_phi(spec: LineSpec) -> PLValue:
    direction, steps = spec
    value = phi(direction)
    for ray, degree in steps:
        value = value - phi(ray) * degree
    return value


def enumerate_pairs(
    P: Sequence[int],
    Q: Sequence[int],
    R: Sequence[int],
    walls: WallTable,
    truncation: int,
    endpoint: Endpoint | None = None,
) -> list[PairOfPants]:
    """All pairs of broken lines from lifts of P and Q ending near R.

    Lifts of P and Q are all (k, 1) with k congruent to the given x-coordinate
    modulo 4; R is used as given. Only pairs whose contribution has a term of
    grade <= truncation are returned.
    """
    if truncation < 1:
        raise TruncationError(f"The pair enumeration needs truncation >= 1, got {truncation}.")
    if P[1] != 1 or Q[1] != 1:
        raise ValueError(f"Both inputs must have y = 1, got {tuple(P)} and {tuple(Q)}.")
    target = (int(R[0]), int(R[1]))
    if not 0 <= target[1] <= 2:
        return []
    endpoint = endpoint or Endpoint.near(target)
    budget = 2 - target[1]
    target_phi = _phi_at(target)
    min_wall_grade = walls.min_grade()
    pairs: list[PairOfPants] = []
    for first, second, shape in _candidates(
        P[0] % 4, Q[0] % 4, target, endpoint.x_hat, truncation
    ):
        exponent = _spec_phi(first) + _spec_phi(second) - target_phi
        bends = len(first[1]) + len(second[1])
        if exponent.grade + bends * min_wall_grade > truncation:
            continue
        lines = []
        for direction, steps in (first, second):
            traced = _trace(direction, steps, endpoint)
            if traced is None:
                break
            lines.append((direction, steps, traced))
        else:
            pair = _build_pair(lines, target, shape, exponent, walls, truncation, endpoint)
            if pair is None:
                continue
            degree = sum(b.degree * b.ray[1] for line in (pair.first, pair.second) for b in line.bends)
            if degree != budget:
                raise InvariantViolation(
                    "bend-budget", f"{shape} pair at {target} bends by {degree}, budget {budget}"
                )
            pair.first.check_invariants()
            pair.second.check_invariants()
            pairs.append(pair)
    logger.debug(
        "%d pairs from %s, %s to %s at truncation %d.",
        len(pairs),
        tuple(P),
        tuple(Q),
        target,
        truncation,
    )
    return pairs


def _build_pair(
    lines: list[tuple[Direction, tuple[Step, ...], list]],
    target: Direction,
    shape: str,
    exponent: PLValue,
    walls: WallTable,
    truncation: int,
    endpoint: Endpoint,
) -> PairOfPants | None:
    if not exponent.is_integral or not exponent.is_effective():
        raise EffectivityError(
            f"The {shape} pair {[(d, s) for d, s, _ in lines]} at {target} "
            f"has phi-exponent {exponent}."
        )
    built = []
    coefficient = QSeries.one(walls.lattice, truncation)
    for direction, steps, traced in lines:
        bends = []
        for (ray, degree), (power, _) in zip(steps, traced):
            function = walls.ray_function(ray[0], ray[1], truncation)
            if function is None:
                return None
            term = function.bend_coefficient(power, degree)
            if term is None:
                return None
            bends.append(Bend(ray=ray, degree=degree, power=power, coefficient=term))
            coefficient = series_mul(coefficient, term)
        built.append(BrokenLine(direction=direction, bends=tuple(bends), endpoint=endpoint))
    contribution = coefficient.shift((*exponent.as_ints(), 0))
    for vector, _ in contribution.items():
        if any(component < 0 for component in vector):
            raise EffectivityError(f"The {shape} pair at {target} has exponent {vector}.")
    if contribution.is_zero():
        return None
    return PairOfPants(
        first=built[0], second=built[1], target=target, shape=shape, contribution=contribution
    )


def theta_product_coefficients(
    P: Sequence[int],
    Q: Sequence[int],
    walls: WallTable,
    truncation: int,
    side: int = 1,
    origin_slope: Fraction = Fraction(1, 3),
) -> dict[Direction, QSeries]:
    """Structure constants of theta_P * theta_Q, keyed by the target point."""
    coefficients: dict[Direction, QSeries] = {}
    for target in TARGETS:
        endpoint = Endpoint.near(target, side=side, origin_slope=origin_slope)
        pairs = enumerate_pairs(P, Q, target, walls, truncation, endpoint)
        if not pairs:
            continue
        total = QSeries.zero(walls.lattice, truncation)
        for pair in pairs:
            total = total + pair.contribution
        if not total.is_zero():
            coefficients[target] = total
    logger.info(
        "theta_%s * theta_%s has %d nonzero structure constants.",
        theta_label(P),
        theta_label(Q),
        len(coefficients),
    )
    return coefficients


def closed_form_unbent(
    P: Sequence[int], Q: Sequence[int], R: Sequence[int], truncation: int, section_grade: int = 1
) -> QSeries:
    """Sum of z^(phi(v1) + phi(v2) - phi(R)) over lifts with v1 + v2 = R."""
    walls = WallTable(section_grade=section_grade)
    x = int(R[0])
    terms: dict[tuple[int, ...], Fraction] = {}
    bound = math.isqrt(truncation) + 3
    for a in range(x // 2 - bound, x // 2 + bound + 1):
        b = x - a
        if (a - P[0]) % 4 or (b - Q[0]) % 4:
            continue
        exponent = phi((a, 1)) + phi((b, 1)) - phi((x, 2))
        vector = (*exponent.as_ints(), 0)
        terms[vector] = terms.get(vector, Fraction(0)) + 1
    return QSeries(walls.lattice, terms, truncation)
