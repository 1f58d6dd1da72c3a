"""Logging configuration for the simulator."""
import logging
import sys
from typing import Optional

from config.loader import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def _resolve(level: Optional[str]) -> int:
    return getattr(logging, (level or settings.log_level).upper(), logging.INFO)


def _handled_loggers():
    for candidate in logging.Logger.manager.loggerDict.values():
        if isinstance(candidate, logging.Logger) and candidate.handlers:
            yield candidate


def setup_logger(name: str = __name__, level: Optional[str] = None) -> logging.Logger:
    """Return the module logger, attaching a stdout handler on first use.

    Args:
        name: Dotted module name, e.g. "time_stepper.scheme"
        level: Level name; settings.log_level (ADHESIVE_LOG_LEVEL) when omitted
    """
    logger = logging.getLogger(name)
    if logger.handlers:
        return logger

    numeric = _resolve(level)
    stream = logging.StreamHandler(sys.stdout)
    stream.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    stream.setLevel(numeric)
    logger.setLevel(numeric)
    logger.addHandler(stream)
    logger.propagate = False
    return logger


def set_level(level: str) -> None:
    """Apply a level name to every logger built by setup_logger (the --log-level flag)."""
    numeric = _resolve(level)
    for logger in _handled_loggers():
        logger.setLevel(numeric)
        for handler in logger.handlers:
            handler.setLevel(numeric)
