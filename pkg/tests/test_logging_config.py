import logging

import pytest

from sdlab.config import LoggingConfig
from sdlab.logging_config import setup_logging


@pytest.fixture(autouse=True)
def _restore_root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


def test_unknown_level_falls_back_to_warning():
    setup_logging(LoggingConfig(level="chatty"))
    assert logging.getLogger().level == logging.WARNING


def test_library_loggers_are_quiet_by_default():
    setup_logging(LoggingConfig(level="DEBUG"))
    assert logging.getLogger().level == logging.DEBUG
    assert logging.getLogger("scipy").level == logging.WARNING


def test_library_loggers_follow_the_level_when_included():
    setup_logging(LoggingConfig(level="INFO", include_library_logs=True))
    assert logging.getLogger("numpy").level == logging.INFO


def test_file_handler(tmp_path):
    path = tmp_path / "sdlab.log"
    setup_logging(LoggingConfig(level="INFO", file=str(path)))
    logging.getLogger("sdlab.test").info("Suite started name=jung")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert "[INFO] sdlab.test: Suite started name=jung" in path.read_text(encoding="utf-8")
