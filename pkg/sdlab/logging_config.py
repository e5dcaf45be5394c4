from __future__ import annotations

import logging
import logging.config
from typing import Any, Dict

from sdlab.config import LoggingConfig

_DEFAULT_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

_LIBRARY_LOGGERS = ("numpy", "scipy", "matplotlib", "hypothesis")


def setup_logging(config: LoggingConfig) -> None:
    """
    Configures application-wide logging.

    Records go to stderr (and to ``config.file`` when set) so that CSV and
    JSON written to stdout stay byte-stable between runs.
    """
    level = _resolve_level(config.level)
    handlers: Dict[str, Dict[str, Any]] = {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "default",
            "level": level,
            "stream": "ext://sys.stderr",
        }
    }
    if config.file:
        handlers["file"] = {
            "class": "logging.FileHandler",
            "formatter": "default",
            "level": level,
            "filename": config.file,
            "encoding": "utf-8",
        }

    library_level = level if config.include_library_logs else max(level, logging.WARNING)
    loggers = {name: {"level": library_level} for name in _LIBRARY_LOGGERS}

    logging.config.dictConfig(
        {
            "version": 1,
            "disable_existing_loggers": False,
            "formatters": {"default": {"format": _DEFAULT_FORMAT}},
            "handlers": handlers,
            "loggers": loggers,
            "root": {"handlers": list(handlers), "level": level},
        }
    )
    logging.getLogger(__name__).debug(
        "Logging configured level=%s include_library_logs=%s file=%s",
        logging.getLevelName(level),
        config.include_library_logs,
        config.file,
    )


def _resolve_level(level_name: str) -> int:
    if not level_name:
        return logging.WARNING
    level = logging.getLevelName(level_name.upper())
    return level if isinstance(level, int) else logging.WARNING
