from __future__ import annotations

import argparse
import logging

from sdlab.config import RunConfig, Settings
from sdlab.services.formatter import format_report
from sdlab.services.suites import SUITES, run_suites


logger = logging.getLogger(__name__)


def register(subparsers: argparse._SubParsersAction, common: argparse.ArgumentParser) -> None:
    verify = subparsers.add_parser(
        "verify",
        parents=[common],
        help="run the fuzz and invariant suites; exit 1 on any violation",
    )
    verify.add_argument(
        "--scale",
        choices=["quick", "full"],
        default="full",
        help="instance counts: full acceptance sizes or a quick smoke run (default: full)",
    )
    verify.add_argument(
        "--suite",
        dest="suites",
        action="append",
        choices=[name for name, _ in SUITES],
        help="run only this suite; may be repeated",
    )
    verify.set_defaults(handler=handle_verify)


def handle_verify(config: RunConfig, settings: Settings) -> str:
    results = run_suites(config.seed, config.scale, settings.tolerances, config.suites)
    logger.info("Verification passed seed=%d scale=%s suites=%d", config.seed, config.scale, len(results))
    return format_report({"seed": config.seed, "scale": config.scale, "passed": True, "suites": results})
