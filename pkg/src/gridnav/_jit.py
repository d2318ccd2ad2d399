"""Numba switch.

Set ``GRIDNAV_DISABLE_JIT=1`` to force the pure-numpy kernels. The flag is
read once at import time.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

JIT_DISABLED = os.environ.get("GRIDNAV_DISABLE_JIT", "").lower() in ("1", "true", "yes")
HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and not JIT_DISABLED


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, otherwise identity."""
    if not HAVE_NUMBA:
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)
