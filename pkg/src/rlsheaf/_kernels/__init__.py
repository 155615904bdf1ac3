"""Hot table kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time from ``RLSHEAF_BACKEND``
(``numba`` or ``numpy``). The default is numba when it imports cleanly.
Both backends expose identical signatures and return identical witnesses
on valid inputs; on invalid inputs either may report a different (but
genuine) witness.
"""

from __future__ import annotations

import os

from . import _numpy

KERNELS = (
    "order_violation",
    "lattice_violation",
    "monoid_violation",
    "adjunction_violation",
    "hom_violation",
    "residuum",
    "filter_masks",
)


def _load_numba():
    try:
        from . import _numba
    except ImportError:  # numba missing or broken
        return None
    return _numba


_requested = os.environ.get("RLSHEAF_BACKEND", "numba").strip().lower()
if _requested not in ("numba", "numpy"):
    raise ValueError(f"RLSHEAF_BACKEND must be 'numba' or 'numpy', got {_requested!r}")

_impl = _load_numba() if _requested == "numba" else None
BACKEND = "numba" if _impl is not None else "numpy"
if _impl is None:
    _impl = _numpy

order_violation = _impl.order_violation
lattice_violation = _impl.lattice_violation
monoid_violation = _impl.monoid_violation
adjunction_violation = _impl.adjunction_violation
hom_violation = _impl.hom_violation
residuum = _impl.residuum
filter_masks = _impl.filter_masks


def backend_module(name: str):
    """Return the kernel module for ``name`` regardless of the active backend."""
    if name == "numpy":
        return _numpy
    if name == "numba":
        mod = _load_numba()
        if mod is None:
            raise ImportError("numba backend unavailable")
        return mod
    raise ValueError(name)
