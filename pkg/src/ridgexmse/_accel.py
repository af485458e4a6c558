"""Optional numba acceleration.

Kernels are written once in a numba-compatible subset and compiled with
``njit`` when numba is importable and ``RIDGEXMSE_DISABLE_NUMBA`` is unset.
Every compiled kernel has a vectorised numpy twin in :mod:`ridgexmse.kernels`.
"""
import os

_DISABLED = os.environ.get("RIDGEXMSE_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}

try:
    if _DISABLED:
        raise ImportError("numba disabled by RIDGEXMSE_DISABLE_NUMBA")
    import numba
    HAS_NUMBA = True
except ImportError:
    numba = None
    HAS_NUMBA = False


def njit(func):
    """Compile ``func`` in nopython mode, or return it unchanged without numba."""
    if HAS_NUMBA:
        return numba.njit(cache=True, nogil=True)(func)
    return func
