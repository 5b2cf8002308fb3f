"""Piecewise-linear scalar fields and the mean-value harmonic solver.

A field assigns one value per vertex; comparisons always use the
symbolic order (value, vertex index), so every field is "Morse" in the
PL sense: no two vertices are ever equal.

Harmonic fields interpolate Dirichlet constraints under the mean-value
weights  w_ij = (tan(theta_ij/2) + tan(phi_ij/2)) / |vj - vi|  with
theta, phi the angles at v_i on either side of the edge.  Positive
weights give a combinatorial maximum principle: no unconstrained vertex
is a local extremum.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph, linalg as sparse_linalg

from . import _kernels
from .errors import FieldError
from .mesh import TriMesh

log = logging.getLogger("pantscut.fields")

HALF_ANGLE_CAP = np.pi / 2 - 1e-6
DEFAULT_TOL = 1e-10


class ScalarField:
    """Per-vertex scalar values on a mesh with a strict symbolic order."""

    def __init__(self, mesh, values):
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (mesh.n_vertices,):
            raise FieldError(
                f"field has {values.shape[0] if values.ndim == 1 else '?'} values "
                f"for {mesh.n_vertices} vertices"
            )
        if not np.isfinite(values).all():
            bad = int(np.nonzero(~np.isfinite(values))[0][0])
            raise FieldError(f"non-finite field value at vertex {bad}")
        self.mesh = mesh
        self.values = values
        self._order = None
        self._rank = None

    @property
    def order(self):
        """Vertex ids sorted ascending by (value, index)."""
        if self._order is None:
            v = self.values
            self._order = np.lexsort((np.arange(len(v)), v))
        return self._order

    @property
    def rank(self):
        """Position of each vertex in the symbolic order."""
        if self._rank is None:
            self._rank = np.empty(len(self.values), dtype=np.int64)
            self._rank[self.order] = np.arange(len(self.values))
        return self._rank

    def below(self, threshold_rank):
        """Boolean mask of vertices with rank <= threshold_rank."""
        return self.rank <= threshold_rank

    def negated(self):
        """Mirror field: sweeps run top-down on the result.

        Negating values reverses the value order; index ties must
        reverse too, which negating alone does not do.  Using rank
        directly keeps the symbolic order exactly reversed.
        """
        n = len(self.values)
        rev = (n - 1 - self.rank).astype(np.float64)
        return ScalarField(self.mesh, rev)

    def is_constant_on_boundary(self):
        for loop in self.mesh.boundary_components():
            vals = self.values[loop]
            if not (vals == vals[0]).all():
                return False
        return True


@dataclass
class DirichletConstraints:
    """Fixed vertex values for the harmonic solve."""

    vertices: np.ndarray
    values: np.ndarray

    @classmethod
    def from_dict(cls, d):
        items = sorted(d.items())
        return cls(
            np.asarray([v for v, _ in items], dtype=np.int64),
            np.asarray([x for _, x in items], dtype=np.float64),
        )

    def check(self, mesh):
        if len(self.vertices) < 2:
            raise FieldError(
                "need at least 2 Dirichlet constraints, got "
                f"{len(self.vertices)}"
            )
        if len(np.unique(self.vertices)) != len(self.vertices):
            raise FieldError("duplicate constraint vertex")
        if self.vertices.min() < 0 or self.vertices.max() >= mesh.n_vertices:
            raise FieldError("constraint vertex out of range")


# ----------------------------------------------------------------------
# mean-value weights


def _corner_half_tans(mesh):
    """tan(angle/2) at every triangle corner, clamped into (0, tan cap]."""
    v = mesh.vertices
    t = mesh.triangles
    tans = np.empty((len(t), 3))
    clamped = 0
    for c in range(3):
        i = t[:, c]
        j = t[:, (c + 1) % 3]
        k = t[:, (c + 2) % 3]
        u = v[j] - v[i]
        w = v[k] - v[i]
        cross = np.linalg.norm(np.cross(u, w), axis=1)
        dot = np.einsum("ij,ij->i", u, w)
        half = 0.5 * np.arctan2(cross, dot)
        over = half > HALF_ANGLE_CAP
        clamped += int(over.sum())
        half = np.minimum(half, HALF_ANGLE_CAP)
        tans[:, c] = np.maximum(np.tan(half), 1e-12)
    if clamped:
        log.warning("clamped %d near-degenerate corner angles", clamped)
    return tans


def mean_value_matrix(mesh):
    """Directed mean-value weight matrix W (csr), W[i,j] = w_ij.

    Raises on zero-length edges.
    """
    t = mesh.triangles
    tans = _corner_half_tans(mesh)
    src = []
    dst = []
    val = []
    for c in range(3):
        i = t[:, c]
        j = t[:, (c + 1) % 3]
        k = t[:, (c + 2) % 3]
        src.append(i)
        dst.append(j)
        val.append(tans[:, c])
        src.append(i)
        dst.append(k)
        val.append(tans[:, c])
    nv = mesh.n_vertices
    W = sparse.csr_matrix(
        (np.concatenate(val), (np.concatenate(src), np.concatenate(dst))),
        shape=(nv, nv),
    )
    W.sum_duplicates()
    rows = np.repeat(np.arange(nv), np.diff(W.indptr))
    lens = np.linalg.norm(mesh.vertices[rows] - mesh.vertices[W.indices], axis=1)
    if (lens == 0).any():
        k = int(np.nonzero(lens == 0)[0][0])
        raise FieldError(
            f"zero-length edge ({rows[k]},{W.indices[k]}): coincident positions"
        )
    W.data /= lens
    return W


def mean_value_weight(mesh, edge):
    """Weight w_ij of the directed edge (i, j); one-sided on the boundary."""
    i, j = int(edge[0]), int(edge[1])
    key = (min(i, j), max(i, j))
    if key not in mesh.edge_index:
        raise FieldError(f"({i},{j}) is not an edge")
    W = mean_value_matrix(mesh)
    return float(W[i, j])


# ----------------------------------------------------------------------
# solvers


def _relaxation_solve(W, values, free, tol, max_iter):
    indptr = W.indptr.astype(np.int64)
    indices = W.indices.astype(np.int64)
    weights = W.data
    free8 = free.astype(np.uint8)
    done = 0
    block = 64
    residual = np.inf
    while done < max_iter:
        n = min(block, max_iter - done)
        residual = _kernels.gauss_seidel(indptr, indices, weights, values, free8, n)
        done += n
        if residual <= tol:
            break
        block = min(block * 2, 4096)
    return values, residual, done


def solve_harmonic(mesh, constraints, tol=DEFAULT_TOL, max_iter=None, method="direct"):
    """Harmonic interpolation of Dirichlet constraints.

    Parameters
    ----------
    mesh : TriMesh
    constraints : DirichletConstraints or dict {vertex: value}
    tol : float
        Acceptance threshold on the relative residual
        |sum_j w_ij (f_j - f_i)| <= tol * sum_j w_ij at every free vertex.
    max_iter : int, optional
        Sweep cap for the relaxation method (default 100 * V).
    method : "direct" or "relax"
        Sparse direct solve (default) or Gauss-Seidel relaxation.

    Returns
    -------
    ScalarField
    """
    if isinstance(constraints, dict):
        constraints = DirichletConstraints.from_dict(constraints)
    constraints.check(mesh)
    nv = mesh.n_vertices
    if max_iter is None:
        max_iter = 100 * nv
    W = mean_value_matrix(mesh)
    free = np.ones(nv, dtype=bool)
    free[constraints.vertices] = False
    values = np.empty(nv)
    values[:] = float(np.mean(constraints.values))
    values[constraints.vertices] = constraints.values

    if not free.any():
        return ScalarField(mesh, values)
    if method == "direct":
        d = np.asarray(W.sum(axis=1)).ravel()
        fidx = np.nonzero(free)[0]
        cidx = constraints.vertices
        A = W[fidx][:, fidx] - sparse.diags(d[fidx])
        b = -W[fidx][:, cidx] @ values[cidx]
        values[fidx] = sparse_linalg.spsolve(A.tocsc(), b)
    elif method == "relax":
        values, _, sweeps = _relaxation_solve(W, values, free, tol, max_iter)
        log.debug("relaxation used %d sweeps", sweeps)
    else:
        raise ValueError(f"unknown method {method!r}")

    d = np.asarray(W.sum(axis=1)).ravel()
    resid = np.abs(W @ values - d * values)
    rel = resid[free] / d[free]
    worst = float(rel.max()) if len(rel) else 0.0
    if worst > tol:
        raise FieldError(
            f"harmonic solve did not reach tol={tol:g}: residual {worst:g} "
            f"(method={method})"
        )
    return ScalarField(mesh, values)


def default_extrema_constraints(mesh):
    """Default constraint pair: z-extreme vertices pinned to 0 and 1."""
    z = mesh.vertices[:, 2]
    vmin = int(np.nonzero(z == z.min())[0][0])
    vmax = int(np.nonzero(z == z.max())[0][0])
    if vmin == vmax:
        raise FieldError("cannot pick distinct extrema (constant z)")
    return DirichletConstraints.from_dict({vmin: 0.0, vmax: 1.0})


def farthest_interior_vertex(mesh):
    """Interior vertex at maximal hop distance from the boundary."""
    on_b = mesh.vertex_on_boundary
    if not on_b.any():
        raise FieldError("mesh has no boundary")
    if on_b.all():
        raise FieldError("mesh has no interior vertex")
    dist = csgraph.dijkstra(
        mesh.vertex_adjacency,
        unweighted=True,
        indices=np.nonzero(on_b)[0],
        min_only=True,
    )
    dist[on_b] = -1.0
    return int(np.argmax(dist))


def solve_boundary_aware(mesh, mode, p_max=None, tol=DEFAULT_TOL, max_iter=None,
                         method="direct"):
    """Harmonic field adapted to surfaces with boundary.

    mode "one_boundary": the single boundary loop is pinned to 0 and an
    interior vertex ``p_max`` (default: hop-farthest from the boundary)
    to 1 --- the only interior critical points are then saddles plus
    ``p_max``.

    mode "multi_boundary": the first boundary loop is pinned to 0, all
    others to 1; no interior extrema at all.
    """
    loops = mesh.boundary_components()
    d = {}
    if mode == "one_boundary":
        if len(loops) != 1:
            raise FieldError(f"one_boundary mode needs b=1, mesh has b={len(loops)}")
        for v in loops[0]:
            d[int(v)] = 0.0
        if p_max is None:
            p_max = farthest_interior_vertex(mesh)
        if mesh.vertex_on_boundary[p_max]:
            raise FieldError("p_max must be an interior vertex")
        d[int(p_max)] = 1.0
    elif mode == "multi_boundary":
        if len(loops) < 2:
            raise FieldError(f"multi_boundary mode needs b>=2, mesh has b={len(loops)}")
        for v in loops[0]:
            d[int(v)] = 0.0
        for loop in loops[1:]:
            for v in loop:
                d[int(v)] = 1.0
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return solve_harmonic(mesh, d, tol=tol, max_iter=max_iter, method=method)


# ----------------------------------------------------------------------
# field files: one decimal value per line


def load_field(mesh, path):
    vals = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            vals.append(float(line))
    if len(vals) != mesh.n_vertices:
        raise FieldError(
            f"field file has {len(vals)} values, mesh has {mesh.n_vertices} vertices"
        )
    field = ScalarField(mesh, np.asarray(vals))
    if mesh.boundary_components() and not field.is_constant_on_boundary():
        raise FieldError("field is not constant on a boundary component")
    return field


def save_field(field, path):
    with open(path, "w") as fh:
        for x in field.values:
            fh.write(f"{float(x)!r}\n")
