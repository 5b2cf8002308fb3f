"""Compiled and pure-Python kernels must be interchangeable.

Every function in ``_kernels`` exists twice: once in Cython
(``_speedups``) and once in plain numpy-backed Python (``pykernels``).
These tests drive both with identical inputs and demand identical
outputs, so either backend can serve the rest of the package.
"""

import os
import subprocess
import sys

import numpy as np
import pytest

import pantscut._kernels as kernels
from pantscut._kernels import pykernels
from pantscut import ScalarField, default_field
from pantscut.fields import mean_value_matrix

speedups = pytest.importorskip(
    "pantscut._kernels._speedups",
    reason="compiled kernels not built; nothing to cross-check",
)

IMPLS = [pykernels, speedups]


def ring_args(mesh):
    return (
        mesh.ring_indptr,
        mesh.ring_verts,
        mesh.ring_closed,
    )


class TestBackendSelection:
    def test_backend_names(self):
        assert pykernels.BACKEND == "python"
        assert speedups.BACKEND == "cython"

    def test_active_backend_matches_flag(self):
        if kernels.HAVE_SPEEDUPS:
            assert kernels.BACKEND == "cython"
        else:
            assert kernels.BACKEND == "python"

    def test_env_var_forces_pure_python(self):
        env = dict(os.environ, PANTSCUT_PURE_PYTHON="1")
        out = subprocess.run(
            [sys.executable, "-c",
             "import pantscut._kernels as k; print(k.BACKEND)"],
            env=env, capture_output=True, text=True, check=True,
        )
        assert out.stdout.strip() == "python"


class TestRingAlternations:
    def test_agreement_on_closed_mesh(self, g2_mesh):
        rng = np.random.default_rng(11)
        centers = np.arange(g2_mesh.n_vertices, dtype=np.int64)
        for _ in range(5):
            rank = ScalarField(
                g2_mesh, rng.standard_normal(g2_mesh.n_vertices)
            ).rank
            alt_p, low_p = pykernels.count_ring_alternations(
                *ring_args(g2_mesh), rank, centers
            )
            alt_c, low_c = speedups.count_ring_alternations(
                *ring_args(g2_mesh), rank, centers
            )
            assert np.array_equal(alt_p, alt_c)
            assert np.array_equal(low_p, low_c)
            assert alt_p.min() >= 0  # every ring on a closed mesh is a cycle

    def test_agreement_with_open_rings(self, pants_mesh):
        rank = default_field(pants_mesh).rank
        centers = np.arange(pants_mesh.n_vertices, dtype=np.int64)
        alt_p, low_p = pykernels.count_ring_alternations(
            *ring_args(pants_mesh), rank, centers
        )
        alt_c, low_c = speedups.count_ring_alternations(
            *ring_args(pants_mesh), rank, centers
        )
        assert np.array_equal(alt_p, alt_c)
        assert np.array_equal(low_p, low_c)
        open_rings = pants_mesh.ring_closed == 0
        assert open_rings.any()
        assert (alt_p[open_rings] == -1).all()
        assert (low_p[open_rings] == -1).all()

    def test_subset_of_centers(self, torus16):
        rank = ScalarField(torus16, torus16.vertices[:, 0].copy()).rank
        centers = np.array([3, 17, 40, 100], dtype=np.int64)
        res_p = pykernels.count_ring_alternations(
            *ring_args(torus16), rank, centers
        )
        res_c = speedups.count_ring_alternations(
            *ring_args(torus16), rank, centers
        )
        for a, b in zip(res_p, res_c):
            assert np.array_equal(a, b)
            assert len(a) == len(centers)


class TestGaussSeidel:
    def run_both(self, mesh, seed=5, sweeps=60):
        W = mean_value_matrix(mesh)
        indptr = np.asarray(W.indptr, dtype=np.int64)
        indices = np.asarray(W.indices, dtype=np.int64)
        weights = np.asarray(W.data, dtype=np.float64)

        rng = np.random.default_rng(seed)
        start = rng.random(mesh.n_vertices)
        free = np.ones(mesh.n_vertices, dtype=np.uint8)
        free[0] = 0
        free[mesh.n_vertices // 2] = 0
        start[0], start[mesh.n_vertices // 2] = 0.0, 1.0

        outs = []
        for impl in IMPLS:
            values = start.copy()
            res = impl.gauss_seidel(indptr, indices, weights, values,
                                    free.copy(), sweeps)
            outs.append((values, res))
        return outs

    def test_identical_iterates(self, g2_mesh):
        (vals_p, res_p), (vals_c, res_c) = self.run_both(g2_mesh)
        # same arithmetic in the same order: bitwise equal
        assert np.array_equal(vals_p, vals_c)
        assert res_p == res_c

    def test_residual_decreases(self, torus16):
        (short_v, short_r), _ = self.run_both(torus16, sweeps=5)
        (long_v, long_r), _ = self.run_both(torus16, sweeps=200)
        assert long_r < short_r

    def test_pinned_vertices_untouched(self, torus16):
        (vals_p, _), (vals_c, _) = self.run_both(torus16)
        assert vals_p[0] == vals_c[0] == 0.0
        mid = torus16.n_vertices // 2
        assert vals_p[mid] == vals_c[mid] == 1.0


def canonical_roots(parent):
    parent = np.asarray(parent)
    roots = np.empty(len(parent), dtype=np.int64)
    for i in range(len(parent)):
        j = i
        while parent[j] != j:
            j = parent[j]
        roots[i] = j
    return roots


class TestUnionTriangleEdges:
    def test_partition_agreement_random_masks(self, g2_mesh):
        tri_edges = g2_mesh.tri_edges
        ne = g2_mesh.n_edges
        rng = np.random.default_rng(23)
        for _ in range(10):
            active = (rng.random(ne) < 0.4).astype(np.uint8)
            par_p = pykernels.union_active_triangle_edges(
                tri_edges, active, np.arange(ne, dtype=np.int64)
            )
            par_c = speedups.union_active_triangle_edges(
                tri_edges, active, np.arange(ne, dtype=np.int64)
            )
            assert np.array_equal(canonical_roots(par_p),
                                  canonical_roots(par_c))

    def test_inactive_edges_stay_singletons(self, torus16):
        tri_edges = torus16.tri_edges
        ne = torus16.n_edges
        active = np.zeros(ne, dtype=np.uint8)
        active[:ne // 3] = 1
        for impl in IMPLS:
            parent = impl.union_active_triangle_edges(
                tri_edges, active, np.arange(ne, dtype=np.int64)
            )
            roots = canonical_roots(parent)
            inactive = np.flatnonzero(active == 0)
            assert np.array_equal(roots[inactive], inactive)


class TestUnionFind:
    def test_min_root_convention(self):
        for impl in IMPLS:
            uf = impl.UnionFind(10)
            assert uf.union(7, 3) == 3
            assert uf.union(3, 9) == 3
            assert uf.union(2, 9) == 2
            assert uf.find(7) == 2
            assert uf.find(5) == 5

    def test_same_roots_after_random_unions(self):
        rng = np.random.default_rng(77)
        pairs = rng.integers(0, 200, size=(300, 2))
        ufs = [impl.UnionFind(200) for impl in IMPLS]
        for a, b in pairs:
            r = [uf.union(int(a), int(b)) for uf in ufs]
            assert r[0] == r[1]
        for i in range(200):
            assert ufs[0].find(i) == ufs[1].find(i)
