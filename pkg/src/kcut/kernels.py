"""Kernel backend selection: compiled extension if available, NumPy otherwise.

Set KCUT_PURE_PYTHON=1 to force the NumPy fallback (used by the
benchmark and the backend-parity tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("KCUT_PURE_PYTHON") == "1":
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

convolve_cyclic = _impl.convolve_cyclic
streams_init = _impl.streams_init
uniform01_block = _impl.uniform01_block
randbelow_block = _impl.randbelow_block
sample_pmf_block = _impl.sample_pmf_block
kcut_positions = _impl.kcut_positions
position_switch_matrix = _impl.position_switch_matrix


def using_compiled() -> bool:
    return BACKEND == "compiled"
