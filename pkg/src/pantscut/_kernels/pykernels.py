"""Pure-Python kernels.

These mirror the Cython versions in ``_speedups.pyx`` exactly; the
package selects one implementation at import time (see ``__init__``).
All functions operate on plain numpy arrays so the two backends are
interchangeable.
"""

import numpy as np

BACKEND = "python"


class UnionFind:
    """Disjoint sets over the integers 0..n-1 with path halving."""

    def __init__(self, n):
        self.parent = np.arange(n, dtype=np.int64)

    def find(self, i):
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if rb < ra:
            ra, rb = rb, ra
        self.parent[rb] = ra
        return ra


def count_ring_alternations(ring_indptr, ring_verts, ring_closed, rank, center):
    """Count sign alternations of ``rank`` around each vertex one-ring.

    Parameters
    ----------
    ring_indptr, ring_verts : int64 arrays
        CSR layout of the ordered one-ring of every vertex.
    ring_closed : uint8 array
        1 where the ring is a full cycle (interior vertex).  Open rings
        are skipped and reported as -1.
    rank : int64 array
        Strict total order of the vertices (value ties broken by index).
    center : int64 array
        Vertex id owning each ring (usually arange(V)).

    Returns
    -------
    alternations, n_lower : int64 arrays
        Cyclic sign-change count and number of ring vertices below the
        center; -1 where the ring is open.
    """
    n = len(center)
    alternations = np.full(n, -1, dtype=np.int64)
    n_lower = np.full(n, -1, dtype=np.int64)
    for i in range(n):
        if not ring_closed[i]:
            continue
        lo, hi = ring_indptr[i], ring_indptr[i + 1]
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
    return alternations, n_lower


def gauss_seidel(indptr, indices, weights, values, free, sweeps):
    """Run ``sweeps`` Gauss-Seidel sweeps of the weighted mean equation.

    Each free vertex is replaced by the weighted average of its
    neighbours (weights are the per-row mean-value weights in CSR
    layout).  Returns the maximum relative residual after the final
    sweep: |sum_j w_ij (x_j - x_i)| / sum_j w_ij.
    """
    n = len(free)
    for _ in range(sweeps):
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
            rel = abs(acc) / wsum
            if rel > worst:
                worst = rel
    return worst


def union_active_triangle_edges(tri_edges, active, parent):
    """Union the active edges of every triangle (components of a level set).

    ``tri_edges`` is (F, 3) edge ids per triangle, ``active`` marks the
    edges crossing the level, ``parent`` is a union-find parent array
    over edges, updated in place.
    """

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    nf = tri_edges.shape[0]
    for t in range(nf):
        e0, e1, e2 = tri_edges[t, 0], tri_edges[t, 1], tri_edges[t, 2]
        first = -1
        if active[e0]:
            first = e0
        if active[e1]:
            if first < 0:
                first = e1
            else:
                ra, rb = find(first), find(e1)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        if active[e2]:
            if first < 0:
                first = e2
            else:
                ra, rb = find(first), find(e2)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    return parent
