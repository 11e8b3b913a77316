"""Logging setup for the command line and batch runner."""

import logging
from pathlib import Path
from typing import Optional, Union

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def configure_logging(level: int = logging.INFO, logfile: Optional[Union[str, Path]] = None) -> None:
    """
    Configure the root ``kuznetsov`` logger.

    Messages go to stderr, and to ``logfile`` as well when given. Calling this twice replaces
    the previous handlers.

    Args:
        level: Logging level of the package logger
        logfile: Optional path of a file receiving a copy of the log
    """
    logger = logging.getLogger("kuznetsov")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    formatter = logging.Formatter(LOG_FORMAT)
    handlers: list = [logging.StreamHandler()]
    if logfile is not None:
        handlers.append(logging.FileHandler(logfile))
    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    logger.setLevel(level)
    logger.propagate = False
