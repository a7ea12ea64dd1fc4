"""The mirror fibre on the symmetric locus and its elliptic curve.

On the symmetric locus the mirror fibre is the pencil of quadrics
X1 X3 = t (X2^2 + X4^2), X2 X4 = t (X1^2 + X3^2) in P3. This module computes
its j-invariant exactly in two independent ways, evaluates the Jacobi theta
functions numerically and checks the identities relating the theta functions
of the mirror to those of the curve.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence, Union

import mpmath
import sympy

from .exceptions import DomainPointError, I4MirrorError, InvariantViolation
from .qseries import QSeries

__all__ = [
    "DEFAULT_DPS",
    "BridgeRow",
    "FamilyDiscriminant",
    "ModularReport",
    "RationalFunction",
    "ThetaValue",
    "WeierstrassData",
    "family_discriminant",
    "j_from_modulus",
    "j_from_modulus_squared",
    "pencil_j_invariant",
    "quartic_pencil_j",
    "s_form",
    "symmetric_locus_bridge",
    "tate_limit",
    "theta",
    "theta_parameter",
    "u_form",
    "weierstrass_data",
]

logger = logging.getLogger(__name__)

DEFAULT_DPS = 60

t, s, u = sympy.symbols("t s u")
X1, X2, X3, X4 = sympy.symbols("X1:5")
lam, mu = sympy.symbols("lambda mu")

Number = Union[int, Fraction, complex, "mpmath.mpc", "mpmath.mpf"]


@dataclass(frozen=True)
class RationalFunction:
    """Reduced quotient of two polynomials in one variable, monic denominator."""

    numerator: sympy.Poly
    denominator: sympy.Poly

    @classmethod
    def from_expr(cls, expression: Any, variable: sympy.Symbol) -> RationalFunction:
        numerator, denominator = sympy.fraction(sympy.cancel(sympy.together(expression)))
        p = sympy.Poly(numerator, variable, domain="QQ")
        q = sympy.Poly(denominator, variable, domain="QQ")
        if q.is_zero:
            raise ZeroDivisionError("The denominator of a rational function vanishes.")
        g = sympy.gcd(p, q)
        p, q = sympy.div(p, g)[0], sympy.div(q, g)[0]
        lead = q.LC()
        return cls(p.mul_ground(1 / lead), q.mul_ground(1 / lead))

    @property
    def variable(self) -> sympy.Symbol:
        return self.numerator.gens[0]

    def as_expr(self) -> Any:
        return self.numerator.as_expr() / self.denominator.as_expr()

    def _other(self, other: Any) -> Any:
        return other.as_expr() if isinstance(other, RationalFunction) else other

    def __add__(self, other: Any) -> RationalFunction:
        return RationalFunction.from_expr(self.as_expr() + self._other(other), self.variable)

    def __sub__(self, other: Any) -> RationalFunction:
        return RationalFunction.from_expr(self.as_expr() - self._other(other), self.variable)

    def __mul__(self, other: Any) -> RationalFunction:
        return RationalFunction.from_expr(self.as_expr() * self._other(other), self.variable)

    def __truediv__(self, other: Any) -> RationalFunction:
        return RationalFunction.from_expr(self.as_expr() / self._other(other), self.variable)

    def compose(self, inner: Any, variable: sympy.Symbol) -> RationalFunction:
        """Substitute ``inner`` (an expression in ``variable``) for the variable."""
        return RationalFunction.from_expr(
            self.as_expr().subs(self.variable, self._other(inner)), variable
        )

    def __call__(self, value: Number) -> Any:
        """Exact value at a rational point, a high precision value elsewhere."""
        if isinstance(value, (int, Fraction)):
            point = sympy.Rational(Fraction(value).numerator, Fraction(value).denominator)
            denominator = self.denominator.eval(point)
            if denominator == 0:
                raise DomainPointError(f"{self.variable} = {value} is a pole.")
            result = self.numerator.eval(point) / denominator
            return Fraction(int(result.p), int(result.q))
        numerator = mpmath.polyval([mpmath.mpf(str(c)) for c in self.numerator.all_coeffs()], value)
        denominator = mpmath.polyval(
            [mpmath.mpf(str(c)) for c in self.denominator.all_coeffs()], value
        )
        if denominator == 0:
            raise DomainPointError(f"{self.variable} = {value} is a pole.")
        return numerator / denominator

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalFunction):
            return NotImplemented
        return (
            self.numerator.all_coeffs() == other.numerator.all_coeffs()
            and self.denominator.all_coeffs() == other.denominator.all_coeffs()
            and self.variable == other.variable
        )

    def __hash__(self) -> int:
        return hash((tuple(self.numerator.all_coeffs()), tuple(self.denominator.all_coeffs())))

    def __str__(self) -> str:
        return f"({self.numerator.as_expr()})/({self.denominator.as_expr()})"

    def to_json(self) -> dict[str, Any]:
        return {
            "variable": str(self.variable),
            "numerator": [str(c) for c in self.numerator.all_coeffs()],
            "denominator": [str(c) for c in self.denominator.all_coeffs()],
        }


@dataclass(frozen=True)
class WeierstrassData:
    a: RationalFunction
    b: RationalFunction
    convention: str = "v^2 = u^3 + a u + b, j = 1728 * 4a^3 / (4a^3 + 27b^2)"

    def j_invariant(self) -> RationalFunction:
        a, b = self.a.as_expr(), self.b.as_expr()
        return RationalFunction.from_expr(1728 * 4 * a**3 / (4 * a**3 + 27 * b**2), t)

    def to_json(self) -> dict[str, Any]:
        return {"a": self.a.to_json(), "b": self.b.to_json(), "convention": self.convention}


def weierstrass_data() -> WeierstrassData:
    """Weierstrass coefficients of the symmetric pencil."""
    R = sympy.Rational
    a = -t**8 / 3 - R(7, 24) * t**4 - R(1, 768)
    b = R(2, 27) * t**12 - R(11, 72) * t**8 - R(11, 1152) * t**4 + R(1, 55296)
    return WeierstrassData(RationalFunction.from_expr(a, t), RationalFunction.from_expr(b, t))


SYMMETRIC_PENCIL = (X1 * X3 - t * X2**2 - t * X4**2, X2 * X4 - t * X1**2 - t * X3**2)


def _binary_quartic(q1: Any, q2: Any, variables: Sequence[sympy.Symbol]) -> list[Any]:
    """Coefficients a0..a4 of det(lambda Q1 + mu Q2) in lambda^(4-i) mu^i."""
    m1 = sympy.hessian(q1, variables) / 2
    m2 = sympy.hessian(q2, variables) / 2
    determinant = sympy.expand((lam * m1 + mu * m2).det())
    poly = sympy.Poly(determinant, lam, mu)
    return [poly.coeff_monomial(lam ** (4 - i) * mu**i) for i in range(5)]


def quartic_pencil_j(
    q1: Any = SYMMETRIC_PENCIL[0], q2: Any = SYMMETRIC_PENCIL[1]
) -> RationalFunction:
    """j of the pencil of quadrics through the invariants of its binary quartic."""
    a0, a1, a2, a3, a4 = _binary_quartic(q1, q2, (X1, X2, X3, X4))
    if all(sympy.simplify(c) == 0 for c in (a0, a1, a2, a3, a4)):
        raise I4MirrorError("The pencil of quadrics is identically singular.")
    I = 12 * a0 * a4 - 3 * a1 * a3 + a2**2
    J = 72 * a0 * a2 * a4 + 9 * a1 * a2 * a3 - 27 * a0 * a3**2 - 27 * a4 * a1**2 - 2 * a2**3
    return RationalFunction.from_expr(1728 * 4 * I**3 / (4 * I**3 - J**2), t)


def pencil_j_invariant() -> RationalFunction:
    """j(t) of the symmetric pencil, required to agree along both computations."""
    weierstrass = weierstrass_data().j_invariant()
    quartic = quartic_pencil_j()
    if weierstrass != quartic:
        raise InvariantViolation(
            "two-path-j", f"Weierstrass path {weierstrass} != quartic path {quartic}"
        )
    logger.info("j-invariant of the symmetric pencil agrees along both paths.")
    return weierstrass


def s_form() -> RationalFunction:
    """j in terms of s = 4 t^2."""
    return pencil_j_invariant().compose(sympy.sqrt(s) / 2, s)


def u_form() -> RationalFunction:
    """j in terms of u = s / 4 = t^2."""
    return s_form().compose(4 * u, u)


def j_from_modulus_squared(value: Any) -> Any:
    """256 (K^2 - K + 1)^3 / (K^2 (K - 1)^2) for K = k^2."""
    if isinstance(value, RationalFunction):
        K = value.as_expr()
        return RationalFunction.from_expr(
            256 * (K**2 - K + 1) ** 3 / (K**2 * (K - 1) ** 2), value.variable
        )
    if value == 0 or value == 1:
        raise DomainPointError(f"j(k) has a pole at k^2 = {value}.")
    return 256 * (value**2 - value + 1) ** 3 / (value**2 * (value - 1) ** 2)


def j_from_modulus(value: Any) -> Any:
    """The j-invariant 256 (k^4 - k^2 + 1)^3 / (k^4 (k^2 - 1)^2) of the Jacobi modulus k."""
    if isinstance(value, RationalFunction):
        return j_from_modulus_squared(value * value)
    if isinstance(value, (int, Fraction)):
        value = Fraction(value)
    return j_from_modulus_squared(value * value)


def pencil_modulus() -> RationalFunction:
    """The modulus k = (t^2 + 1/4) / t of the symmetric pencil."""
    return RationalFunction.from_expr((t**2 + sympy.Rational(1, 4)) / t, t)


@dataclass
class ThetaValue:
    """Theta constant Theta_kind(0, rho) with a certified bound on the omitted tail."""

    kind: int
    rho: complex
    value: Any
    tail_bound: Any
    terms: int

    def oracle(self) -> Any:
        """The same constant from mpmath.jtheta with nome exp(i pi rho)."""
        nome = mpmath.exp(1j * mpmath.pi * mpmath.mpmathify(self.rho))
        return mpmath.jtheta(self.kind, 0, nome)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "rho": [self.rho.real, self.rho.imag],
            "value": [str(mpmath.re(self.value)), str(mpmath.im(self.value))],
            "tail_bound": mpmath.nstr(self.tail_bound, 5),
            "terms": self.terms,
        }


def theta(kind: int, rho: complex, tol: float = 1e-30, dps: int = DEFAULT_DPS) -> ThetaValue:
    """Theta_kind(0, rho) with q = exp(i pi rho), summed until the tail is below ``tol``."""
    if kind not in (1, 2, 3, 4):
        raise ValueError(f"Theta functions are numbered 1 to 4, got {kind}.")
    rho = complex(rho)
    if rho.imag <= 0:
        raise DomainPointError(f"Theta functions need Im(rho) > 0, got {rho}.")
    with mpmath.workdps(dps):
        nome = mpmath.exp(1j * mpmath.pi * mpmath.mpmathify(rho))
        size = abs(nome)
        if kind == 1:
            return ThetaValue(kind, rho, mpmath.mpc(0), mpmath.mpf(0), 0)
        total = mpmath.mpc(0) if kind == 2 else mpmath.mpc(1)
        n = 0
        while True:
            if kind == 2:
                exponent = (mpmath.mpf(n) + mpmath.mpf(1) / 2) ** 2
                # exp(i pi rho e) directly, a principal power of the nome has the wrong phase.
                total += 2 * mpmath.exp(1j * mpmath.pi * mpmath.mpmathify(rho) * exponent)
                gap = 2 * n + 4
                following = (mpmath.mpf(n) + mpmath.mpf(3) / 2) ** 2
            else:
                n += 1
                sign = (-1) ** n if kind == 4 else 1
                total += 2 * sign * nome ** (n * n)
                gap = 2 * n + 3
                following = (n + 1) ** 2
            # Successive exponents grow by at least ``gap``, so the tail is geometric.
            tail = 2 * size**following / (1 - size**gap)
            if tail < tol:
                terms = n + 1
                break
            if kind == 2:
                n += 1
        return ThetaValue(kind, rho, +total, tail, terms)


def _theta_values(rho: complex, tol: float, dps: int) -> dict[int, Any]:
    return {kind: theta(kind, rho, tol, dps).value for kind in (2, 3, 4)}


def theta_parameter(rho: complex, tol: float = 1e-40, dps: int = DEFAULT_DPS) -> Any:
    """The pencil parameter t = Theta_2 / (2 Theta_3) at rho."""
    with mpmath.workdps(dps):
        return theta(2, rho, tol, dps).value / (2 * theta(3, rho, tol, dps).value)


@dataclass
class BridgeRow:
    identity: str
    lhs: Any
    rhs: Any
    constant: Any
    expected: Fraction
    convention: str
    provenance: str = "measured"

    @property
    def residual(self) -> Any:
        return abs(self.lhs * self.expected - self.rhs)

    def to_json(self) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "lhs": mpmath.nstr(self.lhs, 20),
            "rhs": mpmath.nstr(self.rhs, 20),
            "constant": mpmath.nstr(self.constant, 15),
            "expected": str(self.expected),
            "residual": mpmath.nstr(self.residual, 5),
            "convention": self.convention,
            "provenance": self.provenance,
        }


def _evaluate(series: QSeries, v: Any) -> Any:
    return mpmath.fsum(
        mpmath.mpf(c.numerator) / c.denominator * v ** exponent[0]
        for exponent, c in series.items()
    )


def symmetric_locus_bridge(
    series: Mapping[str, QSeries],
    rho: complex,
    nome_power: int = 4,
    tol: float = 1e-40,
    dps: int = DEFAULT_DPS,
) -> list[BridgeRow]:
    """Compare specialized mirror series with theta constants at q = v^nome_power.

    Recognized keys are ``f`` (against Theta_2, constant 2), ``theta_self``
    (against (Theta_3 + Theta_4) / 2), ``theta_cross`` (against
    (Theta_3 - Theta_4) / 2) and ``t`` (against Theta_2 / (2 Theta_3)).
    """
    if nome_power not in (1, 2, 4):
        raise ValueError(f"The nome power is 1, 2 or 4, got {nome_power}.")
    convention = f"q = exp(i pi rho) = v^{nome_power}"
    with mpmath.workdps(dps):
        v = mpmath.exp(1j * mpmath.pi * mpmath.mpmathify(complex(rho)) / nome_power)
        if abs(v) >= 1:
            raise DomainPointError(f"The series diverge at |v| = {mpmath.nstr(abs(v), 5)}.")
        thetas = _theta_values(rho, tol, dps)
        targets = {
            "f": (thetas[2], Fraction(2)),
            "theta_self": ((thetas[3] + thetas[4]) / 2, Fraction(1)),
            "theta_cross": ((thetas[3] - thetas[4]) / 2, Fraction(1)),
            "t": (thetas[2] / (2 * thetas[3]), Fraction(1)),
        }
        rows = []
        for name, (rhs, expected) in targets.items():
            if name not in series:
                continue
            lhs = _evaluate(series[name], v)
            constant = rhs / lhs if lhs else mpmath.mpc(0)
            rows.append(BridgeRow(name, lhs, rhs, constant, expected, convention))
            logger.debug("Bridge %s: constant %s.", name, mpmath.nstr(constant, 10))
    return rows


@dataclass
class ModularReport:
    rho: complex
    checks: dict[str, Any] = field(default_factory=dict)
    tolerance: float = 1e-8

    @property
    def passed(self) -> bool:
        return all(value < self.tolerance for value in self.checks.values())

    def to_json(self) -> dict[str, Any]:
        return {
            "rho": [self.rho.real, self.rho.imag],
            "checks": {name: mpmath.nstr(value, 5) for name, value in self.checks.items()},
            "passed": self.passed,
        }


def _relative(a: Any, b: Any) -> Any:
    return abs(a - b) / max(abs(a), abs(b), 1)


def modular_consistency(
    rho: complex, tol: float = 1e-40, dps: int = DEFAULT_DPS, tolerance: float = 1e-8
) -> ModularReport:
    """Transformation laws of theta ratios and the j-invariant of the mirror curve.

    The j-invariant of the pencil at t = Theta_2 / (2 Theta_3) is compared with
    j at sigma = rho / (2 - rho) computed from the classical modulus and from
    mpmath.kleinj.
    """
    rho = complex(rho)
    report = ModularReport(rho=rho, tolerance=tolerance)
    with mpmath.workdps(dps):
        here = _theta_values(rho, tol, dps)
        shifted = _theta_values(rho + 1, tol, dps)
        half = _theta_values(rho / 2, tol, dps)
        report.checks["theta3/theta4 under rho -> rho + 1"] = _relative(
            here[3] / here[4], shifted[4] / shifted[3]
        )
        report.checks["half period"] = _relative(
            (here[2] ** 2 + here[3] ** 2) / (2 * here[2] * here[3]), half[3] ** 2 / half[2] ** 2
        )
        t_value = here[2] / (2 * here[3])
        j_pencil = j_from_modulus((t_value**2 + mpmath.mpf(1) / 4) / t_value)
        sigma = rho / (2 - rho)
        other = _theta_values(sigma, tol, dps)
        j_classical = j_from_modulus(other[2] ** 2 / other[3] ** 2)
        j_klein = 1728 * mpmath.kleinj(mpmath.mpmathify(sigma))
        report.checks["j pencil vs modulus at rho/(2-rho)"] = _relative(j_pencil, j_classical)
        report.checks["j pencil vs kleinj at rho/(2-rho)"] = _relative(j_pencil, j_klein)
    if not report.passed:
        logger.warning("Modular consistency failed at rho=%s: %s", rho, report.checks)
    return report


@dataclass
class TateLimit:
    ys: list[float]
    values: list[Any]

    @property
    def increasing(self) -> bool:
        sizes = [abs(v) for v in self.values]
        return all(b > a for a, b in zip(sizes, sizes[1:]))

    def to_json(self) -> dict[str, Any]:
        return {
            "ys": self.ys,
            "j": [mpmath.nstr(v, 15) for v in self.values],
            "increasing": self.increasing,
        }


def tate_limit(
    ys: Iterable[float] = (5, 10, 20), tol: float = 1e-40, dps: int = DEFAULT_DPS
) -> TateLimit:
    """j of the mirror curve along rho = i y, it blows up as y grows."""
    ys = [float(y) for y in ys]
    values = []
    with mpmath.workdps(dps):
        for y in ys:
            t_value = theta_parameter(complex(0, y), tol, dps)
            values.append(j_from_modulus((t_value**2 + mpmath.mpf(1) / 4) / t_value))
    return TateLimit(ys=ys, values=values)


x1, y1, x2, y2, x3, y3 = sympy.symbols("x1 y1 x2 y2 x3 y3")

#: Fibre equation of the example double cover of P1 x P1.
EXAMPLE_FAMILY = x1 * x2 * x3**2 + x1 * y2 * x3 * y3 + 2 * y1 * x2 * x3 * y3 + y1 * y2 * y3**2


@dataclass
class FamilyDiscriminant:
    double_cover: Any
    secondary: Any
    factors: list[tuple[str, int]]

    @property
    def singular_fibres(self) -> int:
        """Number of distinct singular fibres over the (x2 : y2) line."""
        return sum(
            sympy.Poly(sympy.sympify(factor), x2, y2).total_degree()
            for factor, _ in self.factors
        )

    def to_json(self) -> dict[str, Any]:
        return {
            "double_cover": str(self.double_cover),
            "secondary": str(self.secondary),
            "factors": [[factor, multiplicity] for factor, multiplicity in self.factors],
            "singular_fibres": self.singular_fibres,
        }


def family_discriminant(polynomial: Any = EXAMPLE_FAMILY) -> FamilyDiscriminant:
    """Discriminants of a family of degree (1, 1, 2) in (x1:y1), (x2:y2), (x3:y3).

    The first is the branch locus of the projection forgetting (x3:y3), the
    second locates the singular fibres of that branch curve over (x2:y2).
    """
    double_cover = sympy.expand(sympy.discriminant(polynomial.subs(y3, 1), x3))
    secondary = sympy.expand(sympy.discriminant(double_cover.subs(y1, 1), x1))
    _, factor_list = sympy.factor_list(secondary, x2, y2)
    factors = [(str(factor), int(multiplicity)) for factor, multiplicity in factor_list]
    return FamilyDiscriminant(double_cover=double_cover, secondary=secondary, factors=factors)


def generic_family(coefficients: Sequence[int] = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)) -> Any:
    """A (1, 1, 2) polynomial with the given coefficients on its twelve monomials."""
    monomials = [
        a * b * c
        for a in (x1, y1)
        for b in (x2, y2)
        for c in (x3**2, x3 * y3, y3**2)
    ]
    return sum(c * m for c, m in zip(coefficients, monomials))
