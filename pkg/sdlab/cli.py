from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import ValidationError

from sdlab import __version__
from sdlab.config import RunConfig, Settings, load_settings
from sdlab.errors import (
    ContainmentError,
    DegenerateSimplexError,
    GeometryInputError,
    VerificationError,
)
from sdlab.handlers import bounds, certify, geometry, search, verify
from sdlab.logging_config import setup_logging
from sdlab.services.formatter import format_report, write_output


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION = 1
EXIT_USAGE = 2

Handler = Callable[[RunConfig, Settings], str]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="random seed (default: $SDLAB_SEED or 0)")
    common.add_argument("--out", type=str, help="also write the output to this file")

    parser = argparse.ArgumentParser(
        prog="sdlab",
        description="Distortion bounds for maps from spheres to Euclidean space.",
    )
    parser.add_argument("--version", action="version", version=f"sdlab {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (bounds, geometry, certify, verify, search):
        module.register(subparsers, common)
    return parser


def _run_config(namespace: argparse.Namespace, settings: Settings) -> RunConfig:
    fields: Dict[str, object] = {
        key: value
        for key, value in vars(namespace).items()
        if key != "handler" and value is not None
    }
    fields.setdefault("seed", settings.search.seed)
    return RunConfig(**fields)


def _emit(text: str, out: Optional[Path]) -> None:
    sys.stdout.write(text)
    sys.stdout.flush()
    write_output(text, out)


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        namespace = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE

    settings = load_settings()
    setup_logging(settings.logging)

    try:
        config = _run_config(namespace, settings)
    except ValidationError as exc:
        parser.print_usage(sys.stderr)
        errors: List[str] = [
            f"{'.'.join(str(part) for part in error['loc']) or 'arguments'}: {error['msg']}"
            for error in exc.errors()
        ]
        sys.stderr.write(f"sdlab: error: {'; '.join(errors)}\n")
        return EXIT_USAGE

    handler: Handler = namespace.handler
    logger.info("Command started command=%s mode=%s seed=%d", config.command, config.mode, config.seed)
    try:
        text = handler(config, settings)
    except VerificationError as exc:
        logger.error("Verification failed: %s", exc)
        _emit(format_report({"passed": False, "error": str(exc), "instance": exc.instance}), config.out)
        return EXIT_VERIFICATION
    except (GeometryInputError, DegenerateSimplexError, ContainmentError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"sdlab: error: {exc}\n")
        return EXIT_USAGE
    except Exception:
        logger.exception("Command terminated with error command=%s", config.command)
        raise

    _emit(text, config.out)
    logger.info("Command finished command=%s", config.command)
    return EXIT_OK


def main() -> None:
    raise SystemExit(run())
