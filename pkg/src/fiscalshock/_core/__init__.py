"""Numerical kernels with a compiled fast path.

The Cython module ``_kernels`` is used when it was built and
``FISCALSHOCK_PURE_PYTHON`` is unset; otherwise the pure-Python
``_fallback`` module provides the same functions.
"""

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # not built
    _compiled = None

if _compiled is not None and not os.environ.get("FISCALSHOCK_PURE_PYTHON"):
    _active = _compiled
    BACKEND = "cython"
else:
    _active = _fallback
    BACKEND = "python"

hp_trend = _active.hp_trend
hp_bands = _active.hp_bands
smo_solve = _active.smo_solve


def backends():
    """Map backend name -> kernel module for every backend available here."""
    out = {"python": _fallback}
    if _compiled is not None:
        out["cython"] = _compiled
    return out


__all__ = ["BACKEND", "backends", "hp_bands", "hp_trend", "smo_solve"]
