"""Scherk-type minimal graphs on geodesic discs."""

from ._scherk import (
    AdmissibilityReport,
    Field,
    ScherkPolygon,
    attach_and_perturb,
    boundary_length,
    check_admissible,
    chord_length,
    fatou_report,
    inscribed_quadrilateral,
    iterate_example,
    polygon_from_json,
    polygon_to_json,
    render_svg,
    solve_disc,
    solve_scherk,
)

__all__ = [
    "AdmissibilityReport",
    "Field",
    "ScherkPolygon",
    "attach_and_perturb",
    "boundary_length",
    "check_admissible",
    "chord_length",
    "fatou_report",
    "inscribed_quadrilateral",
    "iterate_example",
    "polygon_from_json",
    "polygon_to_json",
    "render_svg",
    "solve_disc",
    "solve_scherk",
]
