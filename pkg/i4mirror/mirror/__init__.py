"""Theta functions of the I4 mirror: walls, broken lines and the mirror equations."""

from .broken_lines import (
    SHAPES,
    TARGETS,
    BrokenLine,
    Endpoint,
    PairOfPants,
    closed_form_unbent,
    enumerate_pairs,
    theta_label,
    theta_product_coefficients,
)
from .equations import (
    MirrorEquations,
    ReducedQuadrics,
    SpotCheckReport,
    assemble_equations,
    coefficient_key,
    pencil_parameter,
    reduced_quadrics,
    relabelled,
    single_bend_series,
    single_bend_terms,
    specialize_symmetric,
    spot_check,
)
from .walls import PROVENANCE_TAGS, RayFunction, RayRef, WallDatum, WallTable, mirror_lattice

__all__ = [
    "PROVENANCE_TAGS",
    "SHAPES",
    "TARGETS",
    "BrokenLine",
    "Endpoint",
    "MirrorEquations",
    "PairOfPants",
    "RayFunction",
    "RayRef",
    "ReducedQuadrics",
    "SpotCheckReport",
    "WallDatum",
    "WallTable",
    "assemble_equations",
    "closed_form_unbent",
    "coefficient_key",
    "enumerate_pairs",
    "mirror_lattice",
    "pencil_parameter",
    "reduced_quadrics",
    "relabelled",
    "single_bend_series",
    "single_bend_terms",
    "specialize_symmetric",
    "spot_check",
    "theta_label",
    "theta_product_coefficients",
]
