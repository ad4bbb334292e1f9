"""Selects the kernel backend.

Setting ``AMPCAP_DISABLE_NUMBA=1`` (or any of ``true``/``yes``) forces the
pure-numpy kernels even when numba is importable.
"""

import os

_FLAG = os.environ.get("AMPCAP_DISABLE_NUMBA", "").strip().lower()

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and _FLAG not in ("1", "true", "yes", "on")


def njit(*args, **kwargs):
    """``numba.njit`` when available, identity decorator otherwise."""
    if HAVE_NUMBA:
        from numba import njit as _njit

        return _njit(*args, **kwargs)

    def deco(fn):
        return fn

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return deco
