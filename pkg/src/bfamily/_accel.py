"""Optional numba acceleration.

Set ``BFAMILY_DISABLE_NUMBA=1`` before import to force the pure-numpy paths.
The flag is read once; tests that need both paths import the kernels module
directly and call the ``*_numba`` / ``*_numpy`` variants.
"""

import os

_DISABLED = os.environ.get("BFAMILY_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by BFAMILY_DISABLE_NUMBA")
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap

    prange = range


def numba_enabled() -> bool:
    return HAVE_NUMBA
