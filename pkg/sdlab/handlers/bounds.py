from __future__ import annotations

import argparse
import logging

from scipy.spatial.distance import cdist

from sdlab.config import RunConfig, Settings
from sdlab.services.bounds import bound_table, sharp_pair, theorem2_bound
from sdlab.services.formatter import format_bound_table, format_report
from sdlab.services.geom_core import barycenter
from sdlab.services.intersect import min_vertex_distance, simplex_intersection


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    bounds = subparsers.add_parser(
        "bounds",
        parents=[common],
        help="CSV table of the vertex and distortion bounds",
    )
    bounds.add_argument("--n-max", type=int, default=10, help="largest dimension in the table (default: 10)")
    bounds.add_argument("--r", type=float, default=1.0, help="sphere radius (default: 1)")
    bounds.set_defaults(handler=handle_bounds)

    construct = subparsers.add_parser(
        "construct",
        parents=[common],
        help="regular simplex pair attaining the vertex bound",
    )
    construct.add_argument("--n", type=int, required=True, help="ambient dimension")
    construct.add_argument("--L", type=float, default=1.0, help="edge length (default: 1)")
    construct.set_defaults(handler=handle_construct)


def handle_bounds(config: RunConfig, settings: Settings) -> str:
    rows = bound_table(config.n_max, config.r)
    logger.info("Bound table built n_max=%d r=%s", config.n_max, config.r)
    return format_bound_table(rows)


def handle_construct(config: RunConfig, settings: Settings) -> str:
    first, second = sharp_pair(config.n, config.L)
    witness = simplex_intersection(first, second, settings.tolerances.lp)
    _, _, d = min_vertex_distance(first, second)
    logger.info("Sharp pair constructed n=%d L=%s d=%.12g", config.n, config.L, d)
    return format_report(
        {
            "n": config.n,
            "L": config.L,
            "dims": [first.dim, second.dim],
            "a": first.to_list(),
            "b": second.to_list(),
            "barycenters": [barycenter(first), barycenter(second)],
            "cross_distances": cdist(first.vertices, second.vertices),
            "min_vertex_distance": d,
            "theorem2_bound": theorem2_bound(config.n, config.L),
            "witness": witness,
        }
    )
