"""
Logging setup for applications built on the package.
"""
import sys

from loguru import logger


def configure_logging(level: str = "INFO", serialize: bool = False) -> None:
    """
    Route package logs to a single stderr sink.

    Args:
        level (str): Minimum level to emit. Defaults to "INFO".
        serialize (bool): Emit loguru's JSON records instead of text. Defaults to False.
    """
    logger.remove()
    logger.add(
        sys.stderr,
        level=level,
        serialize=serialize,
        format="<green>{time:HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | {name}:{function} - {message}",
    )
    logger.enable("src")
