"""Backend selection for the exact kernels.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``MATQUAD_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python implementation is used.
"""
from __future__ import annotations

import os

from . import _kernels_py

_force_py = os.environ.get("MATQUAD_PURE_PYTHON", "") not in ("", "0")

if _force_py:
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

echelon = _impl.echelon
poly_det = _impl.poly_det

__all__ = ["BACKEND", "echelon", "poly_det"]
