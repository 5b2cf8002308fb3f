"""Kernel backend selection.

The compiled Cython kernels are used when available; setting
PANTSCUT_PURE_PYTHON=1 forces the pure-Python fallback (useful for
benchmarking and debugging).
"""

import os

if os.environ.get("PANTSCUT_PURE_PYTHON", "") not in ("", "0"):
    from . import pykernels as _impl

    HAVE_SPEEDUPS = False
else:
    try:
        from . import _speedups as _impl  # type: ignore[attr-defined]

        HAVE_SPEEDUPS = True
    except ImportError:
        from . import pykernels as _impl

        HAVE_SPEEDUPS = False

BACKEND = _impl.BACKEND
UnionFind = _impl.UnionFind
count_ring_alternations = _impl.count_ring_alternations
gauss_seidel = _impl.gauss_seidel
union_active_triangle_edges = _impl.union_active_triangle_edges
