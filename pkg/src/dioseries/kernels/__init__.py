"""Hot loops over term indices.

Two interchangeable backends: numba-compiled loops (default when numba
imports) and a vectorized numpy fallback.  Set ``DIOSERIES_DISABLE_NUMBA=1``
to force the fallback.  Every sum returns ``(sum, sum_err, rad_sum, abs_sum)``
where ``sum_err`` bounds the floating-point summation error and ``rad_sum``
bounds the accumulated per-term error, so the exact partial sum lies within
``sum_err + rad_sum`` of ``sum``.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _numpy
from ._scalar import M32

DISABLE_ENV = "DIOSERIES_DISABLE_NUMBA"
MAX_INDEX = (1 << 31) - 1

try:
    from . import _numba
except ImportError:  # pragma: no cover
    _numba = None


def numba_available() -> bool:
    return _numba is not None


def get_backend(name: str | None = None) -> ModuleType:
    """Resolve a backend by name ('numba' or 'numpy'); None uses the env flag."""
    if name is None:
        flag = os.environ.get(DISABLE_ENV, "").strip().lower()
        name = "numpy" if flag in ("1", "true", "yes", "on") or _numba is None else "numba"
    if name == "numba":
        if _numba is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return _numba
    if name == "numpy":
        return _numpy
    raise ValueError(f"unknown backend {name!r}")


def backend_name(name: str | None = None) -> str:
    return "numba" if get_backend(name) is _numba else "numpy"


def split_limbs(t: int) -> np.ndarray:
    """Split a 128-bit fixed-point fraction into four 32-bit int64 limbs."""
    if not 0 <= t < (1 << 128):
        raise ValueError("fixed-point value out of range")
    return np.array([(t >> s) & M32 for s in (96, 64, 32, 0)], dtype=np.int64)


def check_range(n_start: int, n_stop: int) -> None:
    if n_start < 1 or n_stop - 1 > MAX_INDEX:
        raise ValueError(f"kernel index range [{n_start}, {n_stop}) outside [1, 2**31)")
