from __future__ import annotations

import argparse
import logging

from sdlab.config import RunConfig, Settings
from sdlab.services.distortion import (
    circle_grid_relation,
    distortion,
    distortion_witness,
    one_dim_certifier,
)
from sdlab.services.formatter import format_report, load_relation, load_values


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    certify = subparsers.add_parser(
        "certify-1d",
        parents=[common],
        help="combinatorial distortion floor for values on the odd circle grid",
    )
    certify.add_argument("--values", type=str, required=True, help="JSON array of m values, m odd")
    certify.add_argument("--r", type=float, default=1.0, help="circle radius (default: 1)")
    certify.set_defaults(handler=handle_certify)

    sampled = subparsers.add_parser(
        "distortion",
        parents=[common],
        help="sampled distortion of a relation file",
    )
    sampled.add_argument("--relation", type=str, required=True, help='JSON {"r": R, "pairs": [{"x": .., "y": ..}]}')
    sampled.add_argument("--workers", type=int, default=1, help="threads for the pairwise scan (default: 1)")
    sampled.set_defaults(handler=handle_distortion)


def handle_certify(config: RunConfig, settings: Settings) -> str:
    values = load_values(config.values)
    certified = one_dim_certifier(values, config.r)
    observed = distortion(circle_grid_relation(values, config.r))
    logger.info(
        "Circle values certified m=%d case=%s bound=%.12g sampled=%.12g",
        len(values),
        certified.certificate.case,
        certified.value,
        observed,
    )
    report = certified.to_dict()
    report["sampled_distortion"] = observed
    return format_report(report)


def handle_distortion(config: RunConfig, settings: Settings) -> str:
    relation = load_relation(config.relation)
    value, i, j = distortion_witness(relation, config.workers)
    logger.info("Relation distortion computed pairs=%d value=%.12g", len(relation), value)
    return format_report({"pairs": len(relation), "distortion": value, "witness": [i, j]})
