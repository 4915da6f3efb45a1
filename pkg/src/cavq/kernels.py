"""Kernel backend selection.

Imports the compiled Cython kernels when available, otherwise the NumPy
reference implementation. ``CAVQ_PURE_PYTHON=1`` forces the fallback (useful
for benchmarking the two backends against each other).
"""

from __future__ import annotations

import os

if os.environ.get("CAVQ_PURE_PYTHON", "") not in ("", "0"):
    from . import _kernels_np as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_np as _impl

BACKEND = _impl.BACKEND

rho_apply_1q = _impl.rho_apply_1q
rho_apply_2q = _impl.rho_apply_2q
rho_apply_cx = _impl.rho_apply_cx
rho_apply_rz = _impl.rho_apply_rz
rho_decay = _impl.rho_decay
psi_apply_1q = _impl.psi_apply_1q
psi_apply_2q = _impl.psi_apply_2q
psi_apply_cx = _impl.psi_apply_cx
psi_apply_rz = _impl.psi_apply_rz


def backend_name() -> str:
    return BACKEND


def numpy_backend():
    from . import _kernels_np
    return _kernels_np


def compiled_backend():
    """The Cython module, or None when the extension is not built."""
    try:
        from . import _kernels
        return _kernels
    except ImportError:
        return None
