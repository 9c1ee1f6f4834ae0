"""Optional numba acceleration.

Every hot kernel is written once as plain Python over numpy arrays. When numba
is importable a compiled twin is created as well. ``FANN_NO_NUMBA=1`` (read at
import time) makes the library dispatch to the uncompiled or vectorized numpy
versions; the compiled twins stay reachable for benchmarking.
"""

from __future__ import annotations

import os
from typing import Callable, Optional

_FLAG = os.environ.get("FANN_NO_NUMBA", "").strip().lower()
DISABLED_BY_ENV = _FLAG in {"1", "true", "yes", "on"}

try:
    import numba as _numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    _numba = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not DISABLED_BY_ENV


def compiled(fn: Callable) -> Optional[Callable]:
    """Return a lazily compiled nopython twin of ``fn``, or None without numba."""
    if not NUMBA_AVAILABLE:
        return None
    return _numba.njit(cache=True)(fn)


def pick(jitted: Optional[Callable], fallback: Callable) -> Callable:
    return jitted if (USE_NUMBA and jitted is not None) else fallback


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"


def helper(fn: Callable) -> Callable:
    """Mark a small helper callable from both plain Python and compiled kernels."""
    if not NUMBA_AVAILABLE:
        return fn
    from numba.extending import register_jitable

    return register_jitable(fn)
