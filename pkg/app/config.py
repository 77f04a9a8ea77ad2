"""
Configuration settings for the Reinforced Walk Lab.
"""
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Application metadata
APP_NAME = "Reinforced Walk Lab"
VERSION = "0.1.0"

# Base directory
BASE_DIR = Path(__file__).parent.parent

# Default location for CLI and dashboard exports (created on first write)
OUTPUT_FOLDER = BASE_DIR / "output"


def _env_int(name: str, default: int) -> int:
    """Read an integer environment variable, falling back on bad input."""
    raw = os.getenv(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logging.getLogger(__name__).warning(
            "Ignoring non-integer %s=%r, using %d", name, raw, default
        )
        return default


# Seed used when neither a flag nor a config file provides one
DEFAULT_SEED = _env_int("REINFORCE_WALK_SEED", 7)

# Replica-level worker processes
DEFAULT_THREADS = _env_int("REINFORCE_WALK_THREADS", 1)

# Memory budget for one vectorised replica chunk
BATCH_MEMORY_BYTES = _env_int("REINFORCE_WALK_BATCH_MB", 256) * 1024 * 1024

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def get_default_seed() -> int:
    """Seed fallback, re-read from the environment so tests can patch it."""
    return _env_int("REINFORCE_WALK_SEED", DEFAULT_SEED)


def setup_logging(level: Optional[str] = None) -> None:
    """
    Configure the root logger.

    Args:
        level: Logging level name; defaults to the LOG_LEVEL environment variable.
    """
    logging.basicConfig(
        level=(level or LOG_LEVEL).upper(),
        format=LOG_FORMAT,
    )


# Default session state
def get_default_session_state() -> Dict[str, Any]:
    """Return default values for the dashboard session state."""
    return {
        "reports": {},
        "active_check": None,
        "seed": DEFAULT_SEED,
    }


# Default session state for initialization
DEFAULT_SESSION_STATE: Dict[str, Any] = get_default_session_state()
