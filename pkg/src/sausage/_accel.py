"""Numba switch shared by the hot kernels.

Every kernel in this package has two implementations: a loop kernel compiled
with ``numba.njit`` and a vectorised pure-numpy path.  The numba path is used
when numba imports cleanly and ``SAUSAGE_NUMBA`` is not set to a false value
(``0``, ``false``, ``no``, ``off``).
"""

import os

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a hard dependency in CI
    numba = None
    HAVE_NUMBA = False

_FALSE = {"0", "false", "no", "off"}

USE_NUMBA = HAVE_NUMBA and os.environ.get("SAUSAGE_NUMBA", "1").strip().lower() not in _FALSE


def njit(*args, **kwargs):
    """``numba.njit`` when numba is importable, identity decorator otherwise."""
    if HAVE_NUMBA:
        return numba.njit(*args, **kwargs)
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return args[0]
    return lambda f: f


def backend():
    return "numba" if USE_NUMBA else "numpy"
