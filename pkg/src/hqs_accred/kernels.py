"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py``. Set ``HQS_ACCRED_PURE=1`` to force
the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("HQS_ACCRED_PURE", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

apply_kraus = _impl.apply_kraus
apply_layer = _impl.apply_layer
