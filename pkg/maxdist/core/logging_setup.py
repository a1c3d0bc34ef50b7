"""
Logging setup for command-line runs. Library modules only create loggers.
"""

import logging

from maxdist.core.config import LOG_LEVEL


def configure_logging(level: str = LOG_LEVEL, verbose: bool = False) -> None:
    resolved = logging.DEBUG if verbose else getattr(logging, level, logging.INFO)
    logging.basicConfig(
        level=resolved,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        force=True,
    )
