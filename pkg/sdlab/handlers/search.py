from __future__ import annotations

import argparse
import logging

import numpy as np

from sdlab.config import RunConfig, Settings
from sdlab.services.distortion import (
    Relation,
    circle_example_map,
    circle_grid_relation,
    function_relation,
    grid_values,
    projection_map_sample,
)
from sdlab.services.formatter import format_report, load_relation
from sdlab.services.geom_core import sample_sphere_coords
from sdlab.services.search import (
    adversarial_vertex_gap_search,
    granas_scan,
    minimax_distortion_search,
)


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    search = subparsers.add_parser("search", help="randomised and optimisation searches")
    modes = search.add_subparsers(dest="mode", required=True, metavar="{minimax,adversarial,granas}")

    minimax = modes.add_parser("minimax", parents=[common], help="minimise sampled distortion of sphere maps")
    minimax.add_argument("--n", type=int, default=1, help="sphere dimension (default: 1)")
    minimax.add_argument("--m", type=int, help="target dimension, at most n (default: n)")
    minimax.add_argument("--r", type=float, default=1.0, help="sphere radius (default: 1)")
    minimax.add_argument("--N", type=int, help="sample size, odd for n=1 (default: 201 for n=1, else 500)")
    minimax.add_argument("--restarts", type=int, help="independent restarts (default: 20)")
    minimax.add_argument("--iterations", type=int, help="subgradient steps per restart (default: 300)")
    minimax.add_argument("--step", type=float, help="initial step as a fraction of r (default: 0.1)")
    minimax.add_argument(
        "--init",
        choices=["auto", "example", "projection", "random"],
        help="initial images (default: auto)",
    )
    minimax.add_argument("--workers", type=int, default=1, help="threads for restarts (default: 1)")
    minimax.set_defaults(handler=handle_minimax)

    adversarial = modes.add_parser(
        "adversarial",
        parents=[common],
        help="hill-climb intersecting simplex pairs against the vertex bound",
    )
    adversarial.add_argument("--n", type=int, required=True, help="ambient dimension")
    adversarial.add_argument("--L", type=float, default=1.0, help="longest edge (default: 1)")
    adversarial.add_argument("--trials", type=int, help="independent climbs (default: 100)")
    adversarial.add_argument("--climb-steps", type=int, help="moves per climb (default: 400)")
    adversarial.add_argument("--step", type=float, help="initial move size as a fraction of L (default: 0.25)")
    adversarial.add_argument("--init", choices=["random", "sharp"], help="starting pair (default: random)")
    adversarial.add_argument("--workers", type=int, default=1, help="threads for trials (default: 1)")
    adversarial.set_defaults(handler=handle_adversarial)

    granas = modes.add_parser(
        "granas",
        parents=[common],
        help="scan for antipodal directions whose image hulls meet",
    )
    granas.add_argument("--relation", type=str, help="relation file; overrides --map")
    granas.add_argument(
        "--map",
        choices=["projection", "example", "constant"],
        default="projection",
        help="sampled map to scan (default: projection)",
    )
    granas.add_argument("--n", type=int, default=2, help="sphere dimension (default: 2)")
    granas.add_argument("--r", type=float, default=1.0, help="sphere radius (default: 1)")
    granas.add_argument("--N", type=int, help="sample size (default: 1001 for n=1, else 2000)")
    granas.add_argument("--eps", type=float, help="ball radius (default: twice the grid mesh)")
    granas.set_defaults(handler=handle_granas)


def handle_minimax(config: RunConfig, settings: Settings) -> str:
    n = config.n
    report = minimax_distortion_search(
        n,
        config.m or n,
        config.r,
        config.N or (201 if n == 1 else 500),
        config.restarts,
        seed=config.seed,
        iterations=config.iterations,
        init=config.init or "auto",
        step=config.step or 0.1,
        workers=config.workers,
    )
    return format_report(report.to_dict())


def handle_adversarial(config: RunConfig, settings: Settings) -> str:
    report = adversarial_vertex_gap_search(
        config.n,
        config.L,
        config.trials,
        config.climb_steps,
        seed=config.seed,
        init=config.init or "random",
        step=config.step or 0.25,
        workers=config.workers,
    )
    return format_report(report.to_dict())


def _sampled_map(config: RunConfig) -> Relation:
    if config.relation is not None:
        return load_relation(config.relation)
    n = config.n
    N = config.N or (1001 if n == 1 else 2000)
    if config.map == "projection":
        return projection_map_sample(n, config.r, N, config.seed)
    if config.map == "example":
        return circle_grid_relation(grid_values(circle_example_map, N, config.r), config.r)
    coords = sample_sphere_coords(n, config.r, N, config.seed)
    return function_relation(coords, np.zeros((N, n)), config.r)


def handle_granas(config: RunConfig, settings: Settings) -> str:
    relation = _sampled_map(config)
    logger.info("Granas scan started map=%s samples=%d", config.map, len(relation))
    report = granas_scan(relation, config.eps, settings.tolerances.lp, seed=config.seed)
    return format_report(report.to_dict())
