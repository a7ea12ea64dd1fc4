"""Machine-readable outputs: JSON documents, CSV series tables and their schemas."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any, Generator, Mapping

import jsonschema

from . import __version__
from .exceptions import I4MirrorError
from .mirror.walls import PROVENANCE_TAGS
from .qseries import QSeries

__all__ = [
    "OutputSchemas",
    "ReportEntry",
    "provenance",
    "series_document",
    "write_json",
    "write_series_csv",
]

logger = logging.getLogger(__name__)


@dataclass
class OutputSchemas:
    """The JSON-schema objects of everything i4mirror writes or reads."""

    series: dict
    walls: dict
    report: dict
    run_config: dict

    @classmethod
    def from_path(cls, path: Path) -> OutputSchemas:
        return cls(
            **{
                field_.name: json.loads(
                    path.joinpath(f"{field_.name}.schema.json").read_text(encoding="utf-8")
                )
                for field_ in fields(cls)
            }
        )

    @classmethod
    def from_package(cls) -> OutputSchemas:
        base = resources.files("i4mirror").joinpath("schemas")
        return cls(
            **{
                field_.name: json.loads(
                    base.joinpath(f"{field_.name}.schema.json").read_text(encoding="utf-8")
                )
                for field_ in fields(cls)
            }
        )

    @property
    def series_document(self) -> dict:
        """A named collection of series with a metadata block."""
        return {**self.series, "$ref": "#/definitions/SeriesDocument"}


def series_document(
    series: Mapping[str, QSeries], tag: str, **details: Any
) -> dict[str, Any]:
    return {
        "metadata": provenance(tag, **details),
        "series": {name: series[name].to_json() for name in sorted(series)},
    }


def provenance(tag: str, **details: Any) -> dict[str, Any]:
    """Metadata block attached to every emitted number."""
    if tag not in PROVENANCE_TAGS:
        raise ValueError(f"Provenance must be one of {PROVENANCE_TAGS}, got {tag!r}.")
    return {"provenance": tag, "i4mirror_version": __version__, **details}


@dataclass
class ReportEntry:
    """One checked identity: both sides, the residual and where the claim comes from."""

    identity: str
    lhs: str
    rhs: str
    residual: str = "0"
    convention: str = ""
    provenance: str = "derived"
    passed: bool = True
    detail: dict[str, Any] = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "ok" if self.passed else "FAILED"

    def to_json(self) -> dict[str, Any]:
        return {
            "identity": self.identity,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "convention": self.convention,
            "provenance": self.provenance,
            "passed": self.passed,
            "detail": self.detail,
        }


def write_json(
    path: Path, document: Mapping[str, Any], schema: Mapping[str, Any] | None = None
) -> Generator[Path, None, None]:
    """Validate ``document`` against ``schema`` and write it with stable key order."""
    if schema is not None:
        try:
            jsonschema.validate(instance=document, schema=schema)
        except jsonschema.ValidationError as error:
            raise I4MirrorError(f"Refusing to write {path.name}: {error.message}") from error
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    yield path


def write_series_csv(
    path: Path, series: Mapping[str, QSeries]
) -> Generator[Path, None, None]:
    """One row per term: name, exponent components, numerator, denominator."""
    path.parent.mkdir(parents=True, exist_ok=True)
    labels: tuple[str, ...] = ()
    for value in series.values():
        if len(value.lattice.labels) > len(labels):
            labels = value.lattice.labels
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["name", *labels, "numerator", "denominator"])
        for name in sorted(series):
            for row in series[name].to_rows():
                *exponent, numerator, denominator = row
                padding = [""] * (len(labels) - len(exponent))
                writer.writerow([name, *exponent, *padding, numerator, denominator])
    yield path
