import functools
import logging

from utils.config_utils import DEFAULT_SEED
from utils.errors import DegenerateSample

logger = logging.getLogger("RetryUtils")


def retry(max_retries=3, reseed_step=1, exceptions=(DegenerateSample,)):
    """
    Decorator that re-runs a sampling function with a fresh seed.

    The wrapped function must accept a ``seed`` keyword argument (defaulting to
    ADJOINT_KEEL_SEED). After each failure the seed is advanced by ``reseed_step``
    times the attempt number.

    :param max_retries: Maximum number of retries before giving up.
    :param reseed_step: Seed increment multiplier between attempts.
    :param exceptions: Tuple of exceptions to catch and retry on.
    """
    def decorator_retry(func):
        @functools.wraps(func)
        def wrapper_retry(*args, seed=DEFAULT_SEED, **kwargs):
            last_exception = None

            for attempt in range(max_retries + 1):
                try:
                    return func(*args, seed=seed, **kwargs)
                except exceptions as e:
                    last_exception = e
                    if attempt < max_retries:
                        seed = seed + reseed_step * (attempt + 1) * 7919
                        logger.warning(f"⚠️ Sample rejected: {func.__name__} (Attempt {attempt + 1}/{max_retries + 1}). Reseeding with {seed}... Error: {e}")
                    else:
                        logger.error(f"❌ Sampling failed: {func.__name__} after {max_retries + 1} attempts. Error: {e}")

            # If we reach here, every sample was rejected
            raise last_exception

        return wrapper_retry
    return decorator_retry
