import logging
import os

from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
DEFAULT_LOG_LEVEL = 'INFO'


def configure_logging(level=None):
    """Install a single stderr handler on the root logger"""
    level = (level or os.getenv('UG_LOG_LEVEL', DEFAULT_LOG_LEVEL)).upper()
    root = logging.getLogger()
    if not any(getattr(h, '_unstable_gibbs', False) for h in root.handlers):
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._unstable_gibbs = True
        root.addHandler(handler)
    root.setLevel(getattr(logging, level, logging.INFO))
    return root


def resolve_threads(config_threads=None):
    """Thread count: config field wins, then UG_THREADS, then 1"""
    if config_threads is not None:
        return max(1, int(config_threads))
    env_value = os.getenv('UG_THREADS')
    if env_value:
        try:
            return max(1, int(env_value))
        except ValueError:
            logging.getLogger(__name__).warning(
                "Ignoring non-integer UG_THREADS=%r", env_value)
    return 1


def database_url():
    """Optional SQLAlchemy URL for the run ledger"""
    return os.getenv('DATABASE_URL') or None
