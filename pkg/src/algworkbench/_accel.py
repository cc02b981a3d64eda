"""Numba switch.

Hot kernels in :mod:`algworkbench.kernels` come in two flavours: an ``@njit``
loop version and a vectorised numpy version. ``ALGWB_DISABLE_NUMBA=1`` (or a
missing numba install) selects the numpy path everywhere.
"""
import os

_flag = os.environ.get("ALGWB_DISABLE_NUMBA", "").strip().lower()

try:
    if _flag in ("1", "true", "yes"):
        raise ImportError("numba disabled by ALGWB_DISABLE_NUMBA")
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda fn: fn


def use_numba():
    return HAVE_NUMBA
