"""Numba switch.

Kernels are compiled with numba unless ``WIREDRIVE_DISABLE_JIT`` is set to a
truthy value (or numba is not importable), in which case the vectorised numpy
implementations are used instead.
"""

import os

DISABLE_ENV = "WIREDRIVE_DISABLE_JIT"

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def _disabled_by_env() -> bool:
    return os.environ.get(DISABLE_ENV, "").strip().lower() in {"1", "true", "yes", "on"}


USE_JIT = numba is not None and not _disabled_by_env()


def njit(fn):
    """Compile ``fn`` in nopython mode when the JIT path is active."""
    if not USE_JIT:
        return fn
    return numba.njit(cache=True)(fn)
