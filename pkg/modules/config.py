# modules/config.py
import sys
from typing import Optional
from loguru import logger

# --- Version ---
APP_NAME = "machine-space"
APP_VERSION = "1.0.0"

# --- Quantifier defaults ---
DEFAULT_FUEL = 10 ** 6
DEFAULT_MAX_FAMILY_SIZE = 8
DEFAULT_MAX_GENERATOR_INDEX = 3
# Hard stop for cover_open enumerations
DEFAULT_MAX_FAMILIES = 200_000
COVER_STRATEGIES = ("refinement", "families")

# --- Runtime ---
DEFAULT_WORKERS = 1
# Stream points refuse reads at or past this digit position
DEFAULT_STREAM_BUDGET = 4096

# --- Finite oracle bounds ---
# Free frame on n generators has Dedekind(n) elements: 2, 3, 6, 20, 168
MAX_FREE_GENERATORS = 4
MAX_SCOTT_ELEMENTS = 16

# --- Space names (CLI --space) ---
SPACE_CANTOR_DIGITS = "cantor-digits"
SPACE_CANTOR_PREFIX = "cantor-prefix"
SPACE_INTERVAL = "interval"

# --- Files ---
CONFIG_FILE = "machine_space.yaml"
LOG_FILE = "machine_space.log"


def configure_logging(level: str = "WARNING", log_file: Optional[str] = None) -> None:
    """Route loguru to stderr at `level`, plus an optional rotating file sink."""
    logger.remove()
    # Only log to stderr if it exists
    if sys.stderr:
        logger.add(sys.stderr, level=level)
    if log_file:
        logger.add(log_file, rotation="1 MB", retention="10 days", level="DEBUG",
                   backtrace=True, diagnose=True)
