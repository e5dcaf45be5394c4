from __future__ import annotations

import argparse
import logging
from typing import Any, Dict

from sdlab.config import RunConfig, Settings
from sdlab.errors import DegenerateSimplexError, GeometryInputError
from sdlab.services.circumsphere import (
    affine_dimension,
    diameter,
    equidistant_circumcenter,
    jung_bound,
    min_enclosing_ball,
)
from sdlab.services.formatter import format_report, load_json, load_points
from sdlab.services.geom_core import Simplex, affinely_independent
from sdlab.services.intersect import (
    hull_intersection,
    min_vertex_distance,
    reduce_to_complementary_dims,
)


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    circumsphere = subparsers.add_parser(
        "circumsphere",
        parents=[common],
        help="equidistant circumcenter, minimum enclosing ball and Jung's bound",
    )
    circumsphere.add_argument("--points", type=str, required=True, help="JSON array of points")
    circumsphere.add_argument(
        "--flavor",
        choices=["equidistant", "min_enclosing", "both"],
        default="both",
        help="which sphere to compute (default: both)",
    )
    circumsphere.set_defaults(handler=handle_circumsphere)

    intersect = subparsers.add_parser(
        "intersect",
        parents=[common],
        help="common point of two convex hulls",
    )
    intersect.add_argument("--points", type=str, required=True, help='JSON object {"a": [...], "b": [...]}')
    intersect.add_argument(
        "--reduce",
        action="store_true",
        help="reduce two intersecting simplices to faces of complementary dimension",
    )
    intersect.set_defaults(handler=handle_intersect)


def handle_circumsphere(config: RunConfig, settings: Settings) -> str:
    points = load_points(load_json(config.points), "points")
    D = diameter(points)
    k = affine_dimension(points, settings.tolerances.affine)
    report: Dict[str, Any] = {"points": points, "diameter": D, "affine_dimension": k}

    if config.flavor in ("equidistant", "both"):
        try:
            sphere = equidistant_circumcenter(Simplex(points), settings.tolerances.degeneracy_rcond)
            report["equidistant"] = sphere
        except DegenerateSimplexError:
            if config.flavor == "equidistant":
                raise
            logger.info("Equidistant circumcenter skipped: points are degenerate")
            report["equidistant"] = None
    if config.flavor in ("min_enclosing", "both"):
        report["min_enclosing"] = min_enclosing_ball(points, seed=config.seed)
    report["jung_bound"] = jung_bound(D, k)
    return format_report(report)


def handle_intersect(config: RunConfig, settings: Settings) -> str:
    data = load_json(config.points)
    if not isinstance(data, dict) or "a" not in data or "b" not in data:
        raise GeometryInputError(f"{config.points} must hold an object with 'a' and 'b'")
    a = load_points(data["a"], "a")
    b = load_points(data["b"], "b")
    tol = settings.tolerances.lp
    witness = hull_intersection(a, b, tol)
    logger.info("Hull intersection checked sizes=(%d, %d) found=%s", a.shape[0], b.shape[0], witness is not None)
    report: Dict[str, Any] = {"intersects": witness is not None, "witness": witness}

    simplices = affinely_independent(a, settings.tolerances.affine) and affinely_independent(
        b, settings.tolerances.affine
    )
    if simplices:
        first, second = Simplex(a), Simplex(b)
        i, j, d = min_vertex_distance(first, second)
        report["min_vertex_distance"] = {"i": i, "j": j, "distance": d}
        if config.reduce and witness is not None:
            face_a, face_b, reduced = reduce_to_complementary_dims(first, second, witness, tol)
            report["reduced"] = {
                "a": face_a.to_list(),
                "b": face_b.to_list(),
                "dims": [face_a.dim, face_b.dim],
                "witness": reduced,
            }
    elif config.reduce:
        raise GeometryInputError("--reduce needs two affinely independent vertex sets")
    return format_report(report)
