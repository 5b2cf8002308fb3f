# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see pykernels.py for the reference implementation."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline cnp.int64_t _find(cnp.int64_t[::1] parent, cnp.int64_t i) nogil:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


cdef class UnionFind:
    """Disjoint sets over the integers 0..n-1 with path halving."""

    cdef public cnp.int64_t[::1] parent

    def __init__(self, Py_ssize_t n):
        self.parent = np.arange(n, dtype=np.int64)

    cpdef cnp.int64_t find(self, cnp.int64_t i):
        return _find(self.parent, i)

    cpdef cnp.int64_t union(self, cnp.int64_t a, cnp.int64_t b):
        cdef cnp.int64_t ra = _find(self.parent, a)
        cdef cnp.int64_t rb = _find(self.parent, b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra


def count_ring_alternations(cnp.int64_t[::1] ring_indptr,
                            cnp.int64_t[::1] ring_verts,
                            cnp.uint8_t[::1] ring_closed,
                            cnp.int64_t[::1] rank,
                            cnp.int64_t[::1] center):
    cdef Py_ssize_t n = center.shape[0]
    alternations_arr = np.full(n, -1, dtype=np.int64)
    n_lower_arr = np.full(n, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] alternations = alternations_arr
    cdef cnp.int64_t[::1] n_lower = n_lower_arr
    cdef Py_ssize_t i, j
    cdef cnp.int64_t lo, hi, rc, alt, low
    cdef bint below, prev_below
    for i in range(n):
        if not ring_closed[i]:
            continue
        lo = ring_indptr[i]
        hi = ring_indptr[i + 1]
        rc = rank[center[i]]
        alt = 0
        low = 0
        prev_below = rank[ring_verts[hi - 1]] < rc
        for j in range(lo, hi):
            below = rank[ring_verts[j]] < rc
            if below:
                low += 1
            if below != prev_below:
                alt += 1
            prev_below = below
        alternations[i] = alt
        n_lower[i] = low
    return alternations_arr, n_lower_arr


def gauss_seidel(cnp.int64_t[::1] indptr,
                 cnp.int64_t[::1] indices,
                 cnp.float64_t[::1] weights,
                 cnp.float64_t[::1] values,
                 cnp.uint8_t[::1] free,
                 Py_ssize_t sweeps):
    cdef Py_ssize_t n = free.shape[0]
    cdef Py_ssize_t s, i
    cdef cnp.int64_t k
    cdef double acc, wsum, w, rel, worst
    for s in range(sweeps):
        for i in range(n):
            if not free[i]:
                continue
            acc = 0.0
            wsum = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                w = weights[k]
                acc += w * values[indices[k]]
                wsum += w
            if wsum > 0.0:
                values[i] = acc / wsum
    worst = 0.0
    for i in range(n):
        if not free[i]:
            continue
        acc = 0.0
        wsum = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            w = weights[k]
            acc += w * (values[indices[k]] - values[i])
            wsum += w
        if wsum > 0.0:
            rel = acc / wsum
            if rel < 0.0:
                rel = -rel
            if rel > worst:
                worst = rel
    return worst


def union_active_triangle_edges(cnp.int64_t[:, ::1] tri_edges,
                                cnp.uint8_t[::1] active,
                                cnp.int64_t[::1] parent):
    cdef Py_ssize_t nf = tri_edges.shape[0]
    cdef Py_ssize_t t
    cdef cnp.int64_t e0, e1, e2, first, ra, rb
    for t in range(nf):
        e0 = tri_edges[t, 0]
        e1 = tri_edges[t, 1]
        e2 = tri_edges[t, 2]
        first = -1
        if active[e0]:
            first = e0
        if active[e1]:
            if first < 0:
                first = e1
            else:
                ra = _find(parent, first)
                rb = _find(parent, e1)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
        if active[e2]:
            if first < 0:
                first = e2
            else:
                ra = _find(parent, first)
                rb = _find(parent, e2)
                if ra != rb:
                    if ra < rb:
                        parent[rb] = ra
                    else:
                        parent[ra] = rb
    return np.asarray(parent)
