import sys

from loguru import logger

from .config import get_settings


def configure_logging(level: str | None = None) -> None:
    """Install a single stderr sink at the configured level."""
    settings = get_settings()
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.LOG_LEVEL).upper(),
        serialize=settings.LOG_JSON,
        format="{time:HH:mm:ss} | {level: <7} | {name}:{function} - {message}",
    )
