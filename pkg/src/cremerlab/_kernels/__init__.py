"""Float hot loops with two interchangeable backends.

``CREMERLAB_KERNELS=numba`` (default when numba imports) or ``numpy``
selects the implementation at import time; ``use(name)`` switches later.
"""

import os

from . import numpy_impl

_NAMES = ("frac_dist_scan", "poly_eval_jac", "newton_batch", "taylor_flow", "taylor_coeffs", "toy_exit")


def _load(name):
    if name == "numpy":
        return numpy_impl
    if name == "numba":
        from . import numba_impl

        return numba_impl
    raise ValueError(f"unknown kernel backend {name!r} (expected numba or numpy)")


def use(name: str) -> str:
    """Switch the active backend; returns the previous one."""
    global backend
    mod = _load(name)
    prev = backend
    for n in _NAMES:
        globals()[n] = getattr(mod, n)
    backend = name
    return prev


backend = "numpy"
_requested = os.environ.get("CREMERLAB_KERNELS", "numba").strip().lower() or "numba"
try:
    use(_requested)
except ImportError:
    use("numpy")


def get(name: str, which: str | None = None):
    """A kernel from a specific backend (or the active one)."""
    return getattr(_load(which or backend), name)
