"""Runtime switches read from the environment.

``PROFILEKIT_DISABLE_NUMBA=1`` selects the pure-numpy kernels even when numba
is importable. ``PROFILEKIT_THREADS`` caps the numba thread pool.
"""

import os

MAX_DEGREE = 5000


def _truthy(value):
    return str(value).strip().lower() in {"1", "true", "yes", "on"}


def numba_requested():
    return not _truthy(os.environ.get("PROFILEKIT_DISABLE_NUMBA", "0"))


def thread_cap():
    raw = os.environ.get("PROFILEKIT_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError:
        return None
    return n if n > 0 else None
