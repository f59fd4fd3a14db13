import os
import logging
from dotenv import load_dotenv

# Load environment variables (settings.env next to the scripts, optional)
script_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
SETTINGS_PATH = os.path.join(script_dir, 'settings.env')
load_dotenv(dotenv_path=SETTINGS_PATH)

LOG_LEVEL = os.getenv('ADJOINT_KEEL_LOG_LEVEL', 'WARNING').upper()

# Configure logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL, logging.WARNING))
logger = logging.getLogger("ConfigUtils")


def _int_setting(key: str, default: int) -> int:
    """Read an integer setting, falling back to the default on junk values."""
    raw = os.getenv(key)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        logger.warning(f"⚠️ Ignoring {key}={raw!r} (not an integer). Using default {default}.")
        return default


DEFAULT_SEED = _int_setting('ADJOINT_KEEL_SEED', 20040517)

# Oracle scale caps
ORACLE_MAX_POINTS = _int_setting('ADJOINT_KEEL_ORACLE_MAX_POINTS', 5)
ORACLE_MAX_DEGREE = _int_setting('ADJOINT_KEEL_ORACLE_MAX_DEGREE', 10)
ORACLE_MAX_DENOMINATOR = _int_setting('ADJOINT_KEEL_ORACLE_MAX_DENOMINATOR', 24)

RESAMPLE_RETRIES = _int_setting('ADJOINT_KEEL_RESAMPLE_RETRIES', 3)
BATCH_JOBS = _int_setting('ADJOINT_KEEL_JOBS', 1)
