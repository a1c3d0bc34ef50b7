"""
Runtime configuration loaded from environment variables (.env supported)
"""

import logging
import os

from dotenv import load_dotenv

load_dotenv()

logger = logging.getLogger(__name__)


def _env_float(name: str, default: float) -> float:
    value = os.getenv(name)
    if not value:
        return default
    try:
        return float(value)
    except ValueError:
        logger.warning(f"Ignoring malformed {name}={value!r}, using {default}")
        return default


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if not value:
        return default
    try:
        return int(float(value))
    except ValueError:
        logger.warning(f"Ignoring malformed {name}={value!r}, using {default}")
        return default


LOG_LEVEL = os.getenv("MAXDIST_LOG_LEVEL", "INFO").upper()
GEOM_TOL = _env_float("MAXDIST_GEOM_TOL", 1e-12)
MAX_CLOUD_SIZE = _env_int("MAXDIST_MAX_CLOUD_SIZE", 10_000_000)


def get_output_dir() -> str:
    """Default directory for CLI artifacts. Read on each call so tests can monkeypatch it."""
    return os.getenv("MAXDIST_OUTPUT_DIR", ".")
