import os

from dotenv import load_dotenv

# Load env variables
load_dotenv()

DEFAULT_TOL = 1e-9
DEFAULT_SUPPORT_EPS = 1e-12
DEFAULT_HEURISTIC_BUDGET = 20000
DEFAULT_BEAM_WIDTH = 64
VERSION = "0.3.0"


def _float_env(name, default):
    raw = os.environ.get(name)
    return float(raw) if raw else default


def _int_env(name, default):
    raw = os.environ.get(name)
    return int(raw) if raw else default


def tolerance():
    return _float_env("QCOMPLEX_TOL", DEFAULT_TOL)


def support_eps():
    """Amplitudes at or below this modulus are treated as numerical dust."""
    return _float_env("QCOMPLEX_SUPPORT_EPS", DEFAULT_SUPPORT_EPS)


def worker_count():
    return max(1, _int_env("QCOMPLEX_THREADS", os.cpu_count() or 1))


def heuristic_budget():
    return _int_env("QCOMPLEX_HEURISTIC_BUDGET", DEFAULT_HEURISTIC_BUDGET)


def beam_width():
    return _int_env("QCOMPLEX_BEAM_WIDTH", DEFAULT_BEAM_WIDTH)


def log_level():
    return os.environ.get("QCOMPLEX_LOG_LEVEL", "WARNING").upper()


def log_file():
    return os.environ.get("QCOMPLEX_LOG_FILE") or None
