# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels.

Operation-for-operation mirror of ``_kernels_py``; every floating-point
expression matches the NumPy fallback so results are bit-identical
(the build uses -ffp-contract=off to rule out FMA contraction).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

BACKEND = "cython"


def tableau_pivot(cnp.float64_t[:, ::1] tab, Py_ssize_t pr, Py_ssize_t pc):
    cdef Py_ssize_t m = tab.shape[0]
    cdef Py_ssize_t n = tab.shape[1]
    cdef Py_ssize_t i, j
    cdef double p = tab[pr, pc]
    cdef double f, prod
    for j in range(n):
        tab[pr, j] = tab[pr, j] / p
    for i in range(m):
        if i == pr:
            continue
        f = tab[i, pc]
        if f != 0.0:
            for j in range(n):
                prod = f * tab[pr, j]
                tab[i, j] = tab[i, j] - prod
        tab[i, pc] = 0.0
    tab[pr, pc] = 1.0


def gf2_rank(mat):
    cdef cnp.uint8_t[:, ::1] m = np.ascontiguousarray(
        np.array(mat, dtype=np.uint8, copy=True) % 2
    )
    cdef Py_ssize_t rows = m.shape[0]
    cdef Py_ssize_t cols = m.shape[1]
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t c, r, i, j
    cdef cnp.uint8_t tmp
    for c in range(cols):
        r = -1
        for i in range(rank, rows):
            if m[i, c]:
                r = i
                break
        if r < 0:
            continue
        if r != rank:
            for j in range(cols):
                tmp = m[rank, j]
                m[rank, j] = m[r, j]
                m[r, j] = tmp
        for i in range(rank + 1, rows):
            if m[i, c]:
                for j in range(cols):
                    m[i, j] ^= m[rank, j]
        rank += 1
        if rank == rows:
            break
    return rank


def delaunay_candidates_2d(cnp.float64_t[:, ::1] pts, double tol):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j, k, q
    cdef double ax, ay, bx, by, cx, cy, orient, operm
    cdef double adx, ady, bdx, bdy, cdx, cdy, aa, bb, cc, det, perm, signed, thresh
    cdef bint inside, near
    accepted = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                ax = pts[i, 0]
                ay = pts[i, 1]
                bx = pts[j, 0]
                by = pts[j, 1]
                cx = pts[k, 0]
                cy = pts[k, 1]
                orient = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
                operm = fabs((bx - ax) * (cy - ay)) + fabs((by - ay) * (cx - ax))
                if orient <= tol * operm and orient >= -(tol * operm):
                    return np.zeros((0, 3), dtype=np.int64), True
                inside = False
                near = False
                for q in range(n):
                    if q == i or q == j or q == k:
                        continue
                    adx = ax - pts[q, 0]
                    ady = ay - pts[q, 1]
                    bdx = bx - pts[q, 0]
                    bdy = by - pts[q, 1]
                    cdx = cx - pts[q, 0]
                    cdy = cy - pts[q, 1]
                    aa = adx * adx + ady * ady
                    bb = bdx * bdx + bdy * bdy
                    cc = cdx * cdx + cdy * cdy
                    det = (
                        aa * (bdx * cdy - bdy * cdx)
                        - bb * (adx * cdy - ady * cdx)
                        + cc * (adx * bdy - ady * bdx)
                    )
                    perm = (
                        aa * (fabs(bdx * cdy) + fabs(bdy * cdx))
                        + bb * (fabs(adx * cdy) + fabs(ady * cdx))
                        + cc * (fabs(adx * bdy) + fabs(ady * bdx))
                    )
                    signed = det if orient > 0.0 else -det
                    thresh = tol * perm
                    if signed > thresh:
                        inside = True
                        break
                    if signed <= thresh and signed >= -thresh:
                        near = True
                if inside:
                    continue
                if near:
                    return np.zeros((0, 3), dtype=np.int64), True
                accepted.append((i, j, k))
    return np.array(accepted, dtype=np.int64).reshape(-1, 3), False


def delaunay_candidates_3d(cnp.float64_t[:, ::1] pts, double tol):
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t i, j, k, l, q
    cdef double ax, ay, az, obx, oby, obz, ocx, ocy, ocz, odx, ody, odz, orient, operm
    cdef double adx, ady, adz, bdx, bdy, bdz, cdx, cdy, cdz, ddx, ddy, ddz
    cdef double aa, bb, cc, dd, m0, m1, m2, m3, p0, p1, p2, p3, det, perm, signed, thresh
    cdef bint inside, near
    accepted = []
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for l in range(k + 1, n):
                    ax = pts[i, 0]
                    ay = pts[i, 1]
                    az = pts[i, 2]
                    obx = pts[j, 0] - ax
                    oby = pts[j, 1] - ay
                    obz = pts[j, 2] - az
                    ocx = pts[k, 0] - ax
                    ocy = pts[k, 1] - ay
                    ocz = pts[k, 2] - az
                    odx = pts[l, 0] - ax
                    ody = pts[l, 1] - ay
                    odz = pts[l, 2] - az
                    orient = (
                        obx * (ocy * odz - ocz * ody)
                        - oby * (ocx * odz - ocz * odx)
                        + obz * (ocx * ody - ocy * odx)
                    )
                    operm = (
                        fabs(obx) * (fabs(ocy * odz) + fabs(ocz * ody))
                        + fabs(oby) * (fabs(ocx * odz) + fabs(ocz * odx))
                        + fabs(obz) * (fabs(ocx * ody) + fabs(ocy * odx))
                    )
                    if orient <= tol * operm and orient >= -(tol * operm):
                        return np.zeros((0, 4), dtype=np.int64), True
                    inside = False
                    near = False
                    for q in range(n):
                        if q == i or q == j or q == k or q == l:
                            continue
                        adx = pts[i, 0] - pts[q, 0]
                        ady = pts[i, 1] - pts[q, 1]
                        adz = pts[i, 2] - pts[q, 2]
                        bdx = pts[j, 0] - pts[q, 0]
                        bdy = pts[j, 1] - pts[q, 1]
                        bdz = pts[j, 2] - pts[q, 2]
                        cdx = pts[k, 0] - pts[q, 0]
                        cdy = pts[k, 1] - pts[q, 1]
                        cdz = pts[k, 2] - pts[q, 2]
                        ddx = pts[l, 0] - pts[q, 0]
                        ddy = pts[l, 1] - pts[q, 1]
                        ddz = pts[l, 2] - pts[q, 2]
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
                            fabs(bdx) * (fabs(cdy * ddz) + fabs(cdz * ddy))
                            + fabs(bdy) * (fabs(cdx * ddz) + fabs(cdz * ddx))
                            + fabs(bdz) * (fabs(cdx * ddy) + fabs(cdy * ddx))
                        )
                        p1 = (
                            fabs(adx) * (fabs(cdy * ddz) + fabs(cdz * ddy))
                            + fabs(ady) * (fabs(cdx * ddz) + fabs(cdz * ddx))
                            + fabs(adz) * (fabs(cdx * ddy) + fabs(cdy * ddx))
                        )
                        p2 = (
                            fabs(adx) * (fabs(bdy * ddz) + fabs(bdz * ddy))
                            + fabs(ady) * (fabs(bdx * ddz) + fabs(bdz * ddx))
                            + fabs(adz) * (fabs(bdx * ddy) + fabs(bdy * ddx))
                        )
                        p3 = (
                            fabs(adx) * (fabs(bdy * cdz) + fabs(bdz * cdy))
                            + fabs(ady) * (fabs(bdx * cdz) + fabs(bdz * cdx))
                            + fabs(adz) * (fabs(bdx * cdy) + fabs(bdy * cdx))
                        )
                        perm = aa * p0 + bb * p1 + cc * p2 + dd * p3
                        signed = det if orient > 0.0 else -det
                        thresh = tol * perm
                        if signed > thresh:
                            inside = True
                            break
                        if signed <= thresh and signed >= -thresh:
                            near = True
                    if inside:
                        continue
                    if near:
                        return np.zeros((0, 4), dtype=np.int64), True
                    accepted.append((i, j, k, l))
    return np.array(accepted, dtype=np.int64).reshape(-1, 4), False
