"""Relative simplicial homology over the two-element field.

For a convex (locally closed) set A the pair (cl A, mo A) has a relative
chain complex whose basis is exactly A: boundaries are the usual facet
sums with faces outside A dropped.  Betti numbers come from GF(2) ranks
of the boundary matrices:  b_k = |A_k| - rank d_k - rank d_{k+1}.

Coefficients are fixed to GF(2), which keeps the reduction exact; torsion
is invisible at this level.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

import numpy as np

from . import kernels
from .complexes import SimplicialComplex, convexity_witness


class NotLocallyClosedError(ValueError):
    """Relative homology asked for a non-convex set (the pair is invalid)."""

    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"set is not locally closed; witness chain {witness}")


def relative_betti(
    K: SimplicialComplex, handles: Iterable[int], check: bool = True
) -> tuple[int, ...]:
    """Betti vector of H(cl A, mo A), indexed by degree 0..dim(A).

    Raises NotLocallyClosedError when A is not convex (so the mouth is not
    closed and the pair is not well defined).
    """
    hs = sorted(set(handles))
    if not hs:
        return ()
    if check:
        w = convexity_witness(K, hs)
        if w is not None:
            raise NotLocallyClosedError(w)
    top = int(max(K.dims[h] for h in hs))
    by_dim: list[list[int]] = [[] for _ in range(top + 1)]
    for h in hs:
        by_dim[K.dims[h]].append(h)
    pos = {h: i for k in range(top + 1) for i, h in enumerate(by_dim[k])}
    inside = set(hs)
    ranks = [0] * (top + 2)
    for k in range(1, top + 1):
        rows, cols = by_dim[k - 1], by_dim[k]
        if not rows or not cols:
            continue
        mat = np.zeros((len(rows), len(cols)), dtype=np.uint8)
        for j, h in enumerate(cols):
            for f in K.facets[h]:
                if f in inside:
                    mat[pos[f], j] = 1
        ranks[k] = kernels.gf2_rank(mat)
    return tuple(
        len(by_dim[k]) - ranks[k] - ranks[k + 1] for k in range(top + 1)
    )


def is_critical(K: SimplicialComplex, handles: Iterable[int]) -> bool:
    """A multivector is critical when its relative homology is non-trivial."""
    return any(b != 0 for b in relative_betti(K, handles))


def conley_index(K: SimplicialComplex, handles: Iterable[int]) -> tuple[int, ...]:
    """Betti vector of the pair (cl S, mo S) for a locally closed set S."""
    return relative_betti(K, handles)


def periodic_parity(betti: Sequence[int]) -> Optional[int]:
    """Parity r in {0, 1} for which consecutive Betti numbers pair up as
    dim H_{2n+r} = dim H_{2n+1+r} for all n, or None.

    Requires the vector to be non-trivial.  Degrees outside the vector are
    treated as zero (so r=1 additionally forces degree 0 to vanish).
    """
    b = list(betti)
    if not any(b):
        return None
    for r in (0, 1):
        padded = ([0] * r) + b
        if len(padded) % 2:
            padded.append(0)
        if all(padded[i] == padded[i + 1] for i in range(0, len(padded), 2)):
            return r
    return None


def classify(betti: Sequence[int], d: int) -> str:
    """Label a Conley index vector for ambient dimension d.

    attractor: homology of a point.  repeller: single generator in top
    degree d.  periodic-orbit-candidate: Betti numbers pair up across
    consecutive degrees (advisory only).  Everything else: other.
    """
    b = list(betti) + [0] * max(0, d + 1 - len(betti))
    if b[0] == 1 and not any(b[1:]):
        return "attractor"
    if len(b) > d and b[d] == 1 and not any(b[:d]) and not any(b[d + 1:]):
        return "repeller"
    if periodic_parity(betti) is not None:
        return "periodic-orbit-candidate"
    return "other"
