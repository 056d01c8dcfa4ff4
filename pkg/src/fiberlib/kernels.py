"""Kernel selection: compiled extension when built, pure Python otherwise.

Set ``FIBERLIB_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py

BACKEND = "python"
if os.environ.get("FIBERLIB_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
else:
    _impl = _kernels_py

nearest_index = _impl.nearest_index
retract_many = _impl.retract_many
nearest_table = _impl.nearest_table
