"""Logging setup shared by the CLI and the HTTP service."""

import logging
from typing import Optional, Union

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

_handler: Optional[logging.Handler] = None


def configure_logging(level: Union[int, str, None] = None) -> logging.Logger:
    """Install one stream handler on the `app` logger.

    Calling it again only changes the level. When `level` is None the
    SHAPESPACE_LOG_LEVEL setting is used.
    """
    global _handler
    if level is None:
        from app.config.settings import get_settings
        level = get_settings().log_level
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING

    logger = logging.getLogger("app")
    if _handler is None:
        _handler = logging.StreamHandler()
        _handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(_handler)
        logger.propagate = False
    logger.setLevel(level)
    return logger
