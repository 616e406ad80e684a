"""Optional numba acceleration.

Set SOLITON_LAB_NO_JIT=1 to run every kernel as plain Python/numpy; this is
also what happens when numba cannot be imported.
"""
import os

_flag = os.environ.get("SOLITON_LAB_NO_JIT", "").strip().lower()
JIT_DISABLED = _flag not in ("", "0", "false", "no")

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

JIT_ENABLED = numba is not None and not JIT_DISABLED


def njit(func):
    if not JIT_ENABLED:
        return func
    return numba.njit(cache=True)(func)
