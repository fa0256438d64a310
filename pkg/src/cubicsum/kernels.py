"""Kernel dispatch: the compiled extension when it imports, else the interpreted twin.

Set ``CUBICSUM_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("CUBICSUM_PURE_PYTHON"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"

bender_wu = _impl.bender_wu
horner_rows = _impl.horner_rows
