"""Pure-NumPy implementations of the hot kernels.

These are the reference semantics for the compiled kernels in
``_kernels_cy.pyx``.  Both backends must produce bit-identical output:
every floating-point expression here is mirrored operation-for-operation
in the Cython source (and the extension is compiled with
``-ffp-contract=off`` so no FMA contraction changes the rounding).
"""

from __future__ import annotations

import itertools
from math import comb

import numpy as np

BACKEND = "python"

_CHUNK = 2048
_N_PROBES = 8


def _combination_indices(n: int, k: int) -> np.ndarray:
    total = comb(n, k)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), k)),
        dtype=np.int64,
        count=total * k,
    )
    return flat.reshape(total, k)


def tableau_pivot(tab: np.ndarray, pr: int, pc: int) -> None:
    """In-place Gauss-Jordan pivot of a dense simplex tableau.

    ``tab`` is (m+1) x n, C-contiguous float64; the last row holds the
    reduced costs.  Normalizes row ``pr`` by the pivot element, eliminates
    column ``pc`` from every other row, then forces the pivot column to an
    exact unit vector to stop drift.
    """
    p = tab[pr, pc]
    piv = tab[pr] / p
    tab[pr] = piv
    col = tab[:, pc].copy()
    col[pr] = 0.0
    tab -= col[:, None] * piv[None, :]
    tab[:, pc] = 0.0
    tab[pr, pc] = 1.0


def gf2_rank(mat: np.ndarray) -> int:
    """Rank over GF(2) of a dense 0/1 matrix (uint8)."""
    m = np.array(mat, dtype=np.uint8, copy=True) % 2
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        sub = m[rank:, c]
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        r = rank + nz[0]
        if r != rank:
            m[[rank, r]] = m[[r, rank]]
        hits = np.nonzero(m[rank + 1:, c])[0]
        if hits.size:
            m[rank + 1 + hits] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def _incircle_dets(pts, ia, ib, ic, qx, qy):
    """Signed in-circle values and their error scale (permanent).

    Positive means strictly inside the circumcircle, after normalizing by
    triangle orientation.  The permanent is the sum of absolute values of
    the determinant terms: comparisons within tol * permanent are treated
    as numerically uncertain.  Shapes: ia/ib/ic (c,), qx/qy (1, n).
    """
    ax = pts[ia, 0][:, None]
    ay = pts[ia, 1][:, None]
    bx = pts[ib, 0][:, None]
    by = pts[ib, 1][:, None]
    cx = pts[ic, 0][:, None]
    cy = pts[ic, 1][:, None]
    adx = ax - qx
    ady = ay - qy
    bdx = bx - qx
    bdy = by - qy
    cdx = cx - qx
    cdy = cy - qy
    aa = adx * adx + ady * ady
    bb = bdx * bdx + bdy * bdy
    cc = cdx * cdx + cdy * cdy
    det = (
        aa * (bdx * cdy - bdy * cdx)
        - bb * (adx * cdy - ady * cdx)
        + cc * (adx * bdy - ady * bdx)
    )
    perm = (
        aa * (np.abs(bdx * cdy) + np.abs(bdy * cdx))
        + bb * (np.abs(adx * cdy) + np.abs(ady * cdx))
        + cc * (np.abs(adx * bdy) + np.abs(ady * bdx))
    )
    orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    operm = np.abs((bx - ax) * (cy - ay)) + np.abs((by - ay) * (cx - ax))
    return np.where(orient > 0.0, det, -det), perm, orient[:, 0], operm[:, 0]


def delaunay_candidates_2d(pts: np.ndarray, tol: float):
    """Empty-circumcircle sweep over all vertex triples.

    Returns (triangles, ambiguous).  A triple is accepted when every other
    point lies strictly outside its circumcircle.  ``ambiguous`` is set
    when some triple is near-degenerate (orientation or in-circle value
    within ``tol`` of its own error scale) while no point is strictly
    inside; callers then perturb the input and re-run.
    """
    n = len(pts)
    qx = pts[:, 0][None, :]
    qy = pts[:, 1][None, :]
    tri_idx = _combination_indices(n, 3)
    accepted = []
    ambiguous = False
    for lo in range(0, len(tri_idx), _CHUNK):
        t = tri_idx[lo : lo + _CHUNK]
        ia, ib, ic = t[:, 0], t[:, 1], t[:, 2]
        det, perm, orient, operm = _incircle_dets(pts, ia, ib, ic, qx, qy)
        if np.any(np.abs(orient) <= tol * operm):
            ambiguous = True
            break
        cols = np.arange(n)[None, :]
        own = (cols == ia[:, None]) | (cols == ib[:, None]) | (cols == ic[:, None])
        thresh = tol * perm
        inside_any = np.any((det > thresh) & ~own, axis=1)
        near_any = np.any((np.abs(det) <= thresh) & ~own, axis=1)
        if np.any(~inside_any & near_any):
            ambiguous = True
            break
        accepted.append(t[~inside_any])
    if ambiguous:
        return np.zeros((0, 3), dtype=np.int64), True
    if accepted:
        return np.concatenate(accepted, axis=0), False
    return np.zeros((0, 3), dtype=np.int64), False


def _orient3d(pts, ia, ib, ic, id_):
    ax, ay, az = pts[ia, 0], pts[ia, 1], pts[ia, 2]
    bx = pts[ib, 0] - ax
    by = pts[ib, 1] - ay
    bz = pts[ib, 2] - az
    cx = pts[ic, 0] - ax
    cy = pts[ic, 1] - ay
    cz = pts[ic, 2] - az
    dx = pts[id_, 0] - ax
    dy = pts[id_, 1] - ay
    dz = pts[id_, 2] - az
    orient = (
        bx * (cy * dz - cz * dy)
        - by * (cx * dz - cz * dx)
        + bz * (cx * dy - cy * dx)
    )
    operm = (
        np.abs(bx) * (np.abs(cy * dz) + np.abs(cz * dy))
        + np.abs(by) * (np.abs(cx * dz) + np.abs(cz * dx))
        + np.abs(bz) * (np.abs(cx * dy) + np.abs(cy * dx))
    )
    return orient, operm


def _insphere_dets(pts, ia, ib, ic, id_, qx, qy, qz, orient):
    adx = pts[ia, 0][:, None] - qx
    ady = pts[ia, 1][:, None] - qy
    adz = pts[ia, 2][:, None] - qz
    bdx = pts[ib, 0][:, None] - qx
    bdy = pts[ib, 1][:, None] - qy
    bdz = pts[ib, 2][:, None] - qz
    cdx = pts[ic, 0][:, None] - qx
    cdy = pts[ic, 1][:, None] - qy
    cdz = pts[ic, 2][:, None] - qz
    ddx = pts[id_, 0][:, None] - qx
    ddy = pts[id_, 1][:, None] - qy
    ddz = pts[id_, 2][:, None] - qz
    aa = adx * adx + ady * ady + adz * adz
    bb = bdx * bdx + bdy * bdy + bdz * bdz
    cc = cdx * cdx + cdy * cdy + cdz * cdz
    dd = ddx * ddx + ddy * ddy + ddz * ddz
    m0 = (
        bdx * (cdy * ddz - cdz * ddy)
        - bdy * (cdx * ddz - cdz * ddx)
        + bdz * (cdx * ddy - cdy * ddx)
    )
    m1 = (
        adx * (cdy * ddz - cdz * ddy)
        - ady * (cdx * ddz - cdz * ddx)
        + adz * (cdx * ddy - cdy * ddx)
    )
    m2 = (
        adx * (bdy * ddz - bdz * ddy)
        - ady * (bdx * ddz - bdz * ddx)
        + adz * (bdx * ddy - bdy * ddx)
    )
    m3 = (
        adx * (bdy * cdz - bdz * cdy)
        - ady * (bdx * cdz - bdz * cdx)
        + adz * (bdx * cdy - bdy * cdx)
    )
    det = aa * m0 - bb * m1 + cc * m2 - dd * m3
    p0 = (
        np.abs(bdx) * (np.abs(cdy * ddz) + np.abs(cdz * ddy))
        + np.abs(bdy) * (np.abs(cdx * ddz) + np.abs(cdz * ddx))
        + np.abs(bdz) * (np.abs(cdx * ddy) + np.abs(cdy * ddx))
    )
    p1 = (
        np.abs(adx) * (np.abs(cdy * ddz) + np.abs(cdz * ddy))
        + np.abs(ady) * (np.abs(cdx * ddz) + np.abs(cdz * ddx))
        + np.abs(adz) * (np.abs(cdx * ddy) + np.abs(cdy * ddx))
    )
    p2 = (
        np.abs(adx) * (np.abs(bdy * ddz) + np.abs(bdz * ddy))
        + np.abs(ady) * (np.abs(bdx * ddz) + np.abs(bdz * ddx))
        + np.abs(adz) * (np.abs(bdx * ddy) + np.abs(bdy * ddx))
    )
    p3 = (
        np.abs(adx) * (np.abs(bdy * cdz) + np.abs(bdz * cdy))
        + np.abs(ady) * (np.abs(bdx * cdz) + np.abs(bdz * cdx))
        + np.abs(adz) * (np.abs(bdx * cdy) + np.abs(bdy * cdx))
    )
    perm = aa * p0 + bb * p1 + cc * p2 + dd * p3
    return np.where(orient[:, None] > 0.0, det, -det), perm


def delaunay_candidates_3d(pts: np.ndarray, tol: float):
    """Empty-circumsphere sweep over all vertex quadruples (see 2D docs).

    Rejection is staged: a fixed probe subset of points first, then the
    full point set for surviving candidates.  Staging changes the work, not
    the outcome, because any strictly-inside point rejects a candidate.
    """
    n = len(pts)
    qx = pts[:, 0][None, :]
    qy = pts[:, 1][None, :]
    qz = pts[:, 2][None, :]
    probes = np.arange(min(_N_PROBES, n))
    tet_idx = _combination_indices(n, 4)
    accepted = []
    ambiguous = False
    cols = np.arange(n)[None, :]
    for lo in range(0, len(tet_idx), _CHUNK):
        t = tet_idx[lo : lo + _CHUNK]
        ia, ib, ic, id_ = t[:, 0], t[:, 1], t[:, 2], t[:, 3]
        orient, operm = _orient3d(pts, ia, ib, ic, id_)
        if np.any(np.abs(orient) <= tol * operm):
            ambiguous = True
            break
        own = (
            (cols == ia[:, None])
            | (cols == ib[:, None])
            | (cols == ic[:, None])
            | (cols == id_[:, None])
        )
        det_p, perm_p = _insphere_dets(
            pts, ia, ib, ic, id_, qx[:, probes], qy[:, probes], qz[:, probes], orient
        )
        hit = np.any((det_p > tol * perm_p) & ~own[:, probes], axis=1)
        surv = np.nonzero(~hit)[0]
        if surv.size:
            ts = t[surv]
            det, perm = _insphere_dets(
                pts, ts[:, 0], ts[:, 1], ts[:, 2], ts[:, 3], qx, qy, qz, orient[surv]
            )
            notown = ~own[surv]
            thresh = tol * perm
            inside_any = np.any((det > thresh) & notown, axis=1)
            near_any = np.any((np.abs(det) <= thresh) & notown, axis=1)
            if np.any(~inside_any & near_any):
                ambiguous = True
                break
            accepted.append(ts[~inside_any])
    if ambiguous:
        return np.zeros((0, 4), dtype=np.int64), True
    if accepted:
        return np.concatenate(accepted, axis=0), False
    return np.zeros((0, 4), dtype=np.int64), False
