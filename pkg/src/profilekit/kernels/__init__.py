"""Hot loops with a numba implementation and a pure-numpy fallback.

The backend is picked once at import from ``PROFILEKIT_DISABLE_NUMBA``; tests
and the benchmark switch it explicitly with :func:`use_backend`.
"""

from contextlib import contextmanager

import numpy as np

from .._config import numba_requested, thread_cap
from . import _numpy_impl

try:  # numba is optional at runtime
    from . import _numba_impl
except Exception:  # pragma: no cover - exercised only without numba
    _numba_impl = None

_BACKENDS = {"numpy": _numpy_impl}
if _numba_impl is not None:
    _BACKENDS["numba"] = _numba_impl
    cap = thread_cap()
    if cap is not None:
        import numba

        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))

_active = "numba" if (_numba_impl is not None and numba_requested()) else "numpy"


def available_backends():
    return sorted(_BACKENDS)


def backend():
    return _active


def set_backend(name):
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {available_backends()}")
    _active = name


@contextmanager
def use_backend(name):
    prev = _active
    set_backend(name)
    try:
        yield
    finally:
        set_backend(prev)


def _impl():
    return _BACKENDS[_active]


def from_roots_log(loglam, cap):
    return _impl().from_roots_log(np.ascontiguousarray(loglam, dtype=np.float64), int(cap))


def signed_groups(logc, xs):
    return _impl().signed_groups(
        np.ascontiguousarray(logc, dtype=np.float64),
        np.ascontiguousarray(np.atleast_1d(xs), dtype=np.float64),
    )


def boxplus_log(l1, l2, n, lf):
    return _impl().boxplus_log(
        np.ascontiguousarray(l1, dtype=np.float64),
        np.ascontiguousarray(l2, dtype=np.float64),
        int(n),
        np.ascontiguousarray(lf, dtype=np.float64),
    )


def critical_points(r, m):
    return _impl().critical_points(
        np.ascontiguousarray(r, dtype=np.float64),
        np.ascontiguousarray(m, dtype=np.float64),
    )
