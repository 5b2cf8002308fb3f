"""Compare the compiled kernels against the pure-Python fallback.

Runs each kernel on identical inputs from a synthetic genus-3 mesh,
checks that both backends agree, and reports best-of-N wall times.
Finishes with an end-to-end decomposition timing per backend (run in a
subprocess because the backend is chosen at import time).

Usage: python3 benchmarks/bench_kernels.py [--res 64] [--repeat 5]
"""

import argparse
import os
import subprocess
import sys
import time

import numpy as np

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from pantscut._kernels import pykernels  # noqa: E402
from pantscut.fields import ScalarField, mean_value_matrix  # noqa: E402
from pantscut.synth import synth_genus_g  # noqa: E402

try:
    from pantscut._kernels import _speedups
except ImportError:
    _speedups = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def report(name, t_py, t_cy):
    line = f"{name:32s} pure {t_py * 1e3:9.2f} ms"
    if t_cy is not None:
        line += f"   cython {t_cy * 1e3:9.2f} ms   speedup {t_py / t_cy:6.1f}x"
    print(line)


def bench_ring_alternations(mesh, field, repeat):
    args = (
        mesh.ring_indptr,
        mesh.ring_verts,
        mesh.ring_closed,
        field.rank,
        np.arange(mesh.n_vertices, dtype=np.int64),
    )
    ref = pykernels.count_ring_alternations(*args)
    t_py = best_of(lambda: pykernels.count_ring_alternations(*args), repeat)
    t_cy = None
    if _speedups is not None:
        out = _speedups.count_ring_alternations(*args)
        assert np.array_equal(out[0], ref[0]) and np.array_equal(out[1], ref[1])
        t_cy = best_of(lambda: _speedups.count_ring_alternations(*args), repeat)
    report("count_ring_alternations", t_py, t_cy)


def bench_gauss_seidel(mesh, repeat, sweeps=200):
    W = mean_value_matrix(mesh)
    indptr = np.asarray(W.indptr, dtype=np.int64)
    indices = np.asarray(W.indices, dtype=np.int64)
    weights = np.ascontiguousarray(W.data)
    free = np.ones(mesh.n_vertices, dtype=np.uint8)
    lo, hi = 0, mesh.n_vertices - 1
    free[[lo, hi]] = 0
    base = np.zeros(mesh.n_vertices)
    base[hi] = 1.0

    def run(impl):
        values = base.copy()
        impl.gauss_seidel(indptr, indices, weights, values, free, sweeps)
        return values

    ref = run(pykernels)
    t_py = best_of(lambda: run(pykernels), repeat)
    t_cy = None
    if _speedups is not None:
        out = run(_speedups)
        assert np.allclose(out, ref, atol=1e-12)
        t_cy = best_of(lambda: run(_speedups), repeat)
    report(f"gauss_seidel ({sweeps} sweeps)", t_py, t_cy)


def bench_union_edges(mesh, field, repeat):
    tri_edges = np.ascontiguousarray(mesh.tri_edges)
    rank = field.rank
    e = mesh.edges
    mid = mesh.n_vertices // 2
    active = ((rank[e[:, 0]] < mid) != (rank[e[:, 1]] < mid)).astype(np.uint8)

    def run(impl):
        parent = np.arange(mesh.n_edges, dtype=np.int64)
        impl.union_active_triangle_edges(tri_edges, active, parent)
        return parent

    def roots(impl):
        parent = np.arange(mesh.n_edges, dtype=np.int64)
        impl.union_active_triangle_edges(tri_edges, active, parent)
        # path-compress fully so both backends are comparable
        out = parent.copy()
        for i in range(len(out)):
            r = i
            while out[r] != r:
                r = out[r]
            out[i] = r
        return out

    ref = roots(pykernels)
    t_py = best_of(lambda: run(pykernels), repeat)
    t_cy = None
    if _speedups is not None:
        assert np.array_equal(roots(_speedups), ref)
        t_cy = best_of(lambda: run(_speedups), repeat)
    report("union_active_triangle_edges", t_py, t_cy)


END_TO_END = """
import time
import pantscut
from pantscut import decompose, default_field, synth_genus_g

mesh = synth_genus_g(3, res={res})
st = mesh.validate()
t0 = time.perf_counter()
field = default_field(mesh, st)
dec = decompose(mesh, field, algorithm="{algo}")
dt = time.perf_counter() - t0
print(f"  backend {{pantscut.BACKEND:8s}} {algo:6s} "
      f"{{dec.n_patches}} patches  {{dt:.3f}} s")
"""


def bench_end_to_end(res):
    print(f"end-to-end decompose, genus 3, res {res}:")
    sys.stdout.flush()
    for algo in ("handle", "reeb"):
        for pure in ("0", "1"):
            env = dict(os.environ, PANTSCUT_PURE_PYTHON=pure)
            code = END_TO_END.format(res=res, algo=algo)
            subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--res", type=int, default=64)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args()

    mesh = synth_genus_g(3, res=args.res)
    mesh.validate()
    field = ScalarField(mesh, mesh.vertices[:, 2].copy())
    print(
        f"mesh: genus 3, res {args.res}: V={mesh.n_vertices} "
        f"F={mesh.n_triangles}"
    )
    if _speedups is None:
        print("compiled kernels not available; timing pure Python only")

    bench_ring_alternations(mesh, field, args.repeat)
    bench_gauss_seidel(mesh, args.repeat)
    bench_union_edges(mesh, field, args.repeat)
    if not args.skip_end_to_end:
        bench_end_to_end(args.res)


if __name__ == "__main__":
    main()
