"""Logger de consola compartido por los casos de uso y el CLI."""

import logging
import sys

from src.framework.config import Config

_FORMAT = "%(message)s"


def get_logger(name: str) -> logging.Logger:
    """Retorna un logger con salida a stderr y el nivel de Config.LOG_LEVEL."""
    logger = logging.getLogger(name)
    if not logger.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_FORMAT))
        logger.addHandler(handler)
        logger.propagate = False
    logger.setLevel(Config.LOG_LEVEL.upper())
    return logger
