"""Kernel backend selection.

The compiled extension is preferred when importable; otherwise the NumPy
fallback is used.  Both produce bit-identical results.  Set
``MVFIELD_BACKEND=python`` to force the fallback or ``=cython`` to require
the extension.
"""

from __future__ import annotations

import os

from . import _kernels_py

_choice = os.environ.get("MVFIELD_BACKEND", "auto")
_impl = _kernels_py
if _choice in ("auto", "cython"):
    try:
        from . import _kernels_cy as _impl  # type: ignore[no-redef]
    except ImportError:
        if _choice == "cython":
            raise

BACKEND: str = _impl.BACKEND

tableau_pivot = _impl.tableau_pivot
gf2_rank = _impl.gf2_rank
delaunay_candidates_2d = _impl.delaunay_candidates_2d
delaunay_candidates_3d = _impl.delaunay_candidates_3d
