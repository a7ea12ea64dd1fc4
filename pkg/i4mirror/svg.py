"""Static SVG figures of the base and of enumerated broken lines."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Generator, Sequence

from jinja2 import ChoiceLoader, Environment, FileSystemLoader, PackageLoader, select_autoescape

from .affine import kink, kink_index
from .mirror.broken_lines import PairOfPants, theta_label

__all__ = ["render_base", "render_broken_lines"]

logger = logging.getLogger(__name__)

COLOURS = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02")


def _environment(templates_path: Path | None = None) -> Environment:
    loaders = [PackageLoader("i4mirror")]
    if templates_path:
        loaders.insert(0, FileSystemLoader(templates_path))
    return Environment(
        loader=ChoiceLoader(loaders),
        autoescape=select_autoescape(["svg", "xml"]),
        trim_blocks=True,
        lstrip_blocks=True,
    )


@dataclass(frozen=True)
class _Viewport:
    """Affine map from the cover (x, y) to SVG pixels, y pointing down."""

    radius: int
    height_units: float = 2.5
    scale: float = 48.0
    margin: float = 24.0

    @property
    def width(self) -> int:
        return int(2 * self.margin + (2 * self.radius + 2) * self.scale)

    @property
    def height(self) -> int:
        return int(2 * self.margin + self.height_units * self.scale)

    def __call__(self, x: float, y: float) -> tuple[float, float]:
        px = self.margin + (x + self.radius + 1) * self.scale
        py = self.height - self.margin - y * self.scale
        return round(px, 2), round(py, 2)


def _context(view: _Viewport, title: str, show_kinks: bool) -> dict[str, Any]:
    top = view.height_units
    rays = []
    for k in range(-view.radius, view.radius + 1):
        x1, y1 = view(0, 0)
        x2, y2 = view(k * top, top)
        label_x, label_y = view(k, 1)
        rays.append(
            {
                "x1": x1,
                "y1": y1,
                "x2": x2,
                "y2": y2,
                "label_x": label_x + 3,
                "label_y": label_y - 3,
                "label": f"v_D{kink_index(k)}",
                "kink": str(kink(k)),
            }
        )
    cone = [view(0, 0), view(0, top), view(top, top)]
    return {"view": view, "title": title, "rays": rays, "cone": cone, "show_kinks": show_kinks}


def render_base(
    path: Path, radius: int = 4, templates_path: Path | None = None
) -> Generator[Path, None, None]:
    """The rays (k, 1) for |k| <= radius with their labels, kinks and the cone C."""
    view = _Viewport(radius=radius)
    template = _environment(templates_path).get_template("base.svg")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        template.render(**_context(view, "Affine base of the I4 mirror", True)), encoding="utf-8"
    )
    yield path


def render_broken_lines(
    path: Path,
    pairs: Sequence[PairOfPants],
    P: Sequence[int],
    Q: Sequence[int],
    templates_path: Path | None = None,
) -> Generator[Path, None, None]:
    """Every enumerated pair of one product, one colour per pair."""
    reach = [abs(x) for pair in pairs for line in (pair.first, pair.second) for x, _ in line.vertices()]
    view = _Viewport(radius=max(3, min(12, int(max(reach, default=3)) + 1)))
    drawn = []
    for index, pair in enumerate(pairs):
        lines = [
            [view(x, y) for x, y in line.vertices()] for line in (pair.first, pair.second)
        ]
        drawn.append({"shape": pair.shape, "colour": COLOURS[index % len(COLOURS)], "lines": lines})
    targets = sorted({pair.target for pair in pairs})
    context = _context(view, f"Broken lines of {tuple(P)} * {tuple(Q)}", False)
    context.update(
        product=f"theta{tuple(P)} * theta{tuple(Q)}",
        target=", ".join(theta_label(target) for target in targets) or "-",
        pairs=drawn,
    )
    template = _environment(templates_path).get_template("broken_lines.svg")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(template.render(**context), encoding="utf-8")
    logger.info("Drew %d pairs of pants.", len(pairs))
    yield path
