"""Optional numba acceleration for the hot combinatorial kernels.

Set ``GBSKERNEL_DISABLE_NUMBA=1`` before import to run every kernel as plain
Python/numpy. Both paths execute the same source, so results agree.
"""

import os

_DISABLED = os.environ.get("GBSKERNEL_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError
    import numba

    NUMBA_ENABLED = True
except ImportError:
    numba = None
    NUMBA_ENABLED = False


def njit(func=None, **kwargs):
    """``numba.njit`` when enabled, identity otherwise.

    The undecorated function stays reachable as ``.py_func`` in both modes.
    """

    def wrap(f):
        if NUMBA_ENABLED:
            return numba.njit(cache=True, **kwargs)(f)
        f.py_func = f
        return f

    if func is not None:
        return wrap(func)
    return wrap
