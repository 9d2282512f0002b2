"""Numba toggle.

Set ``CKL_DISABLE_NUMBA=1`` to force the pure-numpy code paths (useful for
debugging and for checking that both paths agree).
"""

import os

_DISABLED = os.environ.get("CKL_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:
    numba = None
    HAVE_NUMBA = False


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]

    def wrap(func):
        return func

    return wrap
