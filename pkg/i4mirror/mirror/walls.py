"""Wall data of the canonical scattering diagram.

Walls are input: their counts come from :mod:`i4mirror.gw`. A wall lives on a
ray of the base, identified by its residue, and lifts to every sheared copy
in the universal cover.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from ruamel.yaml import YAML

from ..exceptions import I4MirrorError
from ..qseries import ExponentLattice, QSeries
from ..utils import fraction_to_str, parse_fraction

__all__ = [
    "PROVENANCE_TAGS",
    "RayFunction",
    "RayRef",
    "WallDatum",
    "WallTable",
    "mirror_lattice",
]

logger = logging.getLogger(__name__)

PROVENANCE_TAGS = ("published", "derived", "measured")


def mirror_lattice(section_grade: int = 1) -> ExponentLattice:
    """Exponents of the mirror family: D1..D4 and the transverse class S."""
    return ExponentLattice(("D1", "D2", "D3", "D4", "S"), (1, 1, 1, 1, section_grade))


@dataclass(frozen=True)
class RayRef:
    """Ray of the base, (k, 1) modulo 4 or (k, 2) with k odd modulo 8."""

    k: int
    height: int = 1

    def __post_init__(self) -> None:
        if self.height not in (1, 2):
            raise ValueError(f"Wall rays have height 1 or 2, got {self.height}.")
        if self.height == 2 and self.k % 2 == 0:
            raise ValueError(f"A height-two ray needs an odd k, got ({self.k}, 2).")
        object.__setattr__(self, "k", self.k % self.period)

    @property
    def period(self) -> int:
        return 4 * self.height

    def matches(self, k: int, height: int) -> bool:
        """Whether the cover ray with primitive (k, height) lies over this ray."""
        return height == self.height and k % self.period == self.k

    def shifted(self, steps: int) -> RayRef:
        """Image under the shear (x, y) -> (x + steps * y, y)."""
        return RayRef(self.k + steps * self.height, self.height)

    @classmethod
    def parse(cls, text: str | int) -> RayRef:
        """Parse '3' for the ray (3, 1) and '5:2' for the ray (5, 2)."""
        k, _, height = str(text).partition(":")
        return cls(int(k), int(height or 1))

    def __str__(self) -> str:
        return str(self.k) if self.height == 1 else f"{self.k}:{self.height}"


@dataclass(frozen=True)
class WallDatum:
    """One term k_beta * N_beta * z^beta of a wall function."""

    ray: RayRef
    tangency: int
    class_tag: str
    count: Fraction
    fibre_steps: int = 0
    class_vector: tuple[int, ...] | None = None
    provenance: str = "derived"

    def __post_init__(self) -> None:
        object.__setattr__(self, "count", Fraction(self.count))
        if self.tangency not in (1, 2):
            raise ValueError(f"Tangency must be 1 or 2, got {self.tangency}.")
        if self.tangency % self.ray.height:
            raise ValueError(
                f"Tangency {self.tangency} is not a multiple of the direction "
                f"({self.ray.k}, {self.ray.height})."
            )
        if self.fibre_steps < 0:
            raise ValueError(f"fibre_steps must be nonnegative, got {self.fibre_steps}.")
        if self.provenance not in PROVENANCE_TAGS:
            raise ValueError(f"Unknown provenance tag {self.provenance!r}.")

    @property
    def multiple(self) -> int:
        """k_beta, the multiple of the primitive ray direction."""
        return self.tangency // self.ray.height

    def exponent(self, section_grade: int = 1) -> tuple[int, ...]:
        """Class of the wall term on the mirror lattice."""
        if self.class_vector is not None:
            return tuple(self.class_vector)
        f = self.fibre_steps
        return (f, f, f, f, self.tangency)

    def to_json(self) -> dict[str, Any]:
        data: dict[str, Any] = {
            "ray": str(self.ray),
            "tangency": self.tangency,
            "class": self.class_tag,
            "fibre_steps": self.fibre_steps,
            "count": fraction_to_str(self.count),
            "provenance": self.provenance,
        }
        if self.class_vector is not None:
            data["class_vector"] = list(self.class_vector)
        return data

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> WallDatum:
        vector = data.get("class_vector")
        return cls(
            ray=RayRef.parse(data["ray"]),
            tangency=int(data["tangency"]),
            class_tag=str(data["class"]),
            count=parse_fraction(data["count"]),
            fibre_steps=int(data.get("fibre_steps", 0)),
            class_vector=tuple(vector) if vector is not None else None,
            provenance=data.get("provenance", "derived"),
        )


@dataclass
class RayFunction:
    """The wall function on one ray of the cover, f = exp(sum_j X^j * L_j).

    X stands for the monomial in direction minus the primitive ray vector,
    ``log_terms[j]`` is the series L_j of classes attached to X^j.
    """

    ray: tuple[int, int]
    log_terms: dict[int, QSeries]

    def bend_coefficient(self, exponent: int, degree: int) -> QSeries | None:
        """The X^degree coefficient of f^exponent, or None when it vanishes."""
        if not self.log_terms:
            return None
        some = next(iter(self.log_terms.values()))
        lattice, truncation = some.lattice, some.truncation
        # exp of a power series in X: j E_j = sum_m m * (e L_m) * E_{j-m}
        powers = [QSeries.one(lattice, truncation)]
        for j in range(1, degree + 1):
            total = QSeries.zero(lattice, truncation)
            for m in range(1, j + 1):
                if m in self.log_terms:
                    total = total + (self.log_terms[m] * powers[j - m]).scale(
                        m * exponent
                    )
            powers.append(total.scale(Fraction(1, j)))
        result = powers[degree]
        return None if result.is_zero() else result


@dataclass
class WallTable:
    """The walls of a scattering diagram, grouped by base ray.

    The walls are kept as a tuple, replacing them (or the section grade)
    drops the cached wall functions.
    """

    walls: tuple[WallDatum, ...] = field(default_factory=tuple)
    section_grade: int = 1
    _functions: dict[tuple[int, int, int], RayFunction | None] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __setattr__(self, name: str, value: Any) -> None:
        if name == "walls":
            value = tuple(value)
        super().__setattr__(name, value)
        if name in ("walls", "section_grade") and "_functions" in self.__dict__:
            self._functions.clear()

    @property
    def lattice(self) -> ExponentLattice:
        return mirror_lattice(self.section_grade)

    def is_empty(self) -> bool:
        return not self.walls

    def __len__(self) -> int:
        return len(self.walls)

    def __iter__(self) -> Iterable[WallDatum]:  # type: ignore[override]
        return iter(self.walls)

    def rays(self) -> list[RayRef]:
        return sorted({w.ray for w in self.walls}, key=lambda r: (r.height, r.k))

    def on_ray(self, k: int, height: int) -> list[WallDatum]:
        return [w for w in self.walls if w.ray.matches(k, height)]

    def min_grade(self) -> int:
        """Smallest grade of a wall class, a lower bound for every bend."""
        lattice = self.lattice
        return min((lattice.grade(w.exponent()) for w in self.walls), default=0)

    def ray_function(self, k: int, height: int, truncation: int) -> RayFunction | None:
        """Wall function on the cover ray with primitive direction (k, height)."""
        residue = k % (4 * height)
        key = (residue, height, truncation)
        if key not in self._functions:
            walls = self.on_ray(k, height)
            self._functions[key] = self._build_function(walls, (k, height), truncation)
        function = self._functions[key]
        if function is None:
            return None
        return replace(function, ray=(k, height))

    def _build_function(
        self, walls: Sequence[WallDatum], ray: tuple[int, int], truncation: int
    ) -> RayFunction | None:
        if not walls:
            return None
        lattice = self.lattice
        grouped: dict[int, dict[tuple[int, ...], Fraction]] = {}
        for wall in walls:
            terms = grouped.setdefault(wall.multiple, {})
            exponent = wall.exponent(self.section_grade)
            terms[exponent] = terms.get(exponent, Fraction(0)) + wall.multiple * wall.count
        log_terms = {
            multiple: QSeries(lattice, terms, truncation)
            for multiple, terms in grouped.items()
        }
        return RayFunction(ray=ray, log_terms=log_terms)

    def shifted(self, steps: int) -> WallTable:
        """Walls moved by the shear (x, y) -> (x + steps * y, y).

        The explicit class vectors are relabelled D_i -> D_{i + steps} along
        with the rays.
        """
        moved = []
        for wall in self.walls:
            vector = wall.class_vector
            if vector is not None:
                d = list(vector[:4])
                d = d[-steps % 4 :] + d[: -steps % 4]
                vector = (*d, *vector[4:])
            moved.append(replace(wall, ray=wall.ray.shifted(steps), class_vector=vector))
        return WallTable(walls=moved, section_grade=self.section_grade)

    def to_json(self) -> dict[str, Any]:
        return {
            "section_grade": self.section_grade,
            "walls": [wall.to_json() for wall in self.walls],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> WallTable:
        return cls(
            walls=[WallDatum.from_json(entry) for entry in data.get("walls", [])],
            section_grade=int(data.get("section_grade", 1)),
        )

    @classmethod
    def load(cls, path: Path | str, schema: Mapping[str, Any] | None = None) -> WallTable:
        """Read a wall table from a YAML (or JSON) file."""
        import jsonschema

        data = YAML(typ="safe").load(Path(path).read_text(encoding="utf-8"))
        if schema is not None:
            try:
                jsonschema.validate(instance=data, schema=schema)
            except jsonschema.ValidationError as error:
                raise I4MirrorError(f"Invalid wall table {path}: {error.message}") from error
        table = cls.from_json(data or {})
        logger.info("Loaded %d walls from %s.", len(table), path)
        return table

    def dump(self, path: Path | str) -> Path:
        path = Path(path)
        yaml = YAML(typ="safe")
        yaml.default_flow_style = False
        with path.open("w", encoding="utf-8") as handle:
            yaml.dump(self.to_json(), handle)
        return path
