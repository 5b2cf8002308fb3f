"""Triangle surface meshes: connectivity, validation, surface type.

The central class is :class:`TriMesh`, an indexed triangle list with
lazily built connectivity (edge table, ordered vertex one-rings,
boundary loops).  Meshes are expected to be orientable 2-manifolds with
consistently oriented triangles; :meth:`TriMesh.validate` checks this
and reports the surface type (genus, boundary count, Euler
characteristic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import MeshValidationError


@dataclass(frozen=True)
class SurfaceType:
    """Topological type (g, b) of a connected orientable surface."""

    genus: int
    boundary_count: int

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.genus - self.boundary_count

    @classmethod
    def from_euler(cls, chi, boundary_count):
        """Type from Euler characteristic and boundary-loop count."""
        g2 = 2 - boundary_count - chi
        if g2 < 0 or g2 % 2 != 0:
            raise MeshValidationError(
                f"no orientable surface has chi={chi} with {boundary_count} "
                "boundary loops"
            )
        return cls(g2 // 2, boundary_count)

    def __str__(self):
        return f"({self.genus},{self.boundary_count})"


class TriMesh:
    """Triangle mesh given as vertex positions plus an indexed face list.

    Parameters
    ----------
    vertices : array_like of shape (V, 3)
        Vertex positions, float64.
    triangles : array_like of shape (F, 3)
        Vertex indices of each triangle, consistently oriented.

    Connectivity (edge table, one-rings, boundary loops) is built on
    first use and cached; the vertex and triangle arrays must not be
    mutated after construction.
    """

    def __init__(self, vertices, triangles):
        self.vertices = np.ascontiguousarray(vertices, dtype=np.float64)
        self.triangles = np.ascontiguousarray(triangles, dtype=np.int64)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise MeshValidationError("vertices must have shape (V, 3)")
        if self.triangles.ndim != 2 or self.triangles.shape[1] != 3:
            raise MeshValidationError("triangles must have shape (F, 3)")
        if self.triangles.size:
            if self.triangles.min() < 0 or self.triangles.max() >= len(self.vertices):
                raise MeshValidationError("triangle index out of range")
            t = self.triangles
            bad = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])
            if bad.any():
                raise MeshValidationError(
                    f"triangle {int(np.nonzero(bad)[0][0])} repeats a vertex"
                )
        self._cache = {}

    # ------------------------------------------------------------------
    # basic counts

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_triangles(self):
        return len(self.triangles)

    @property
    def n_edges(self):
        return len(self.edges)

    def euler_characteristic(self):
        """V - E + F."""
        return self.n_vertices - self.n_edges + self.n_triangles

    def bbox_diagonal(self):
        if not len(self.vertices):
            return 0.0
        span = self.vertices.max(axis=0) - self.vertices.min(axis=0)
        return float(np.linalg.norm(span))

    # ------------------------------------------------------------------
    # edge table

    def _build_edges(self):
        t = self.triangles
        # directed halfedges, 3 per face, in orientation order
        he = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        und = np.sort(he, axis=1)
        edges, inverse = np.unique(und, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        counts = np.bincount(inverse, minlength=len(edges))
        # face ids for the stacked halfedge array
        face_of = np.tile(np.arange(len(t)), 3)
        edge_tris = np.full((len(edges), 2), -1, dtype=np.int64)
        order = np.argsort(inverse, kind="stable")
        pos = np.zeros(len(edges), dtype=np.int64)
        for k in order:
            e = inverse[k]
            if pos[e] < 2:
                edge_tris[e, pos[e]] = face_of[k]
            pos[e] += 1
        tri_edges = inverse.reshape(3, len(t)).T.copy()
        self._cache["edges"] = edges
        self._cache["edge_counts"] = counts
        self._cache["edge_tris"] = edge_tris
        self._cache["tri_edges"] = tri_edges
        self._cache["halfedges"] = he

    def _edge_item(self, key):
        if key not in self._cache:
            self._build_edges()
        return self._cache[key]

    @property
    def edges(self):
        """Undirected edges, shape (E, 2), each row sorted ascending."""
        return self._edge_item("edges")

    @property
    def edge_counts(self):
        """Number of incident triangles per edge."""
        return self._edge_item("edge_counts")

    @property
    def edge_tris(self):
        """Up to two incident triangle ids per edge (-1 where absent)."""
        return self._edge_item("edge_tris")

    @property
    def tri_edges(self):
        """Edge ids of each triangle, shape (F, 3)."""
        return self._edge_item("tri_edges")

    @property
    def edge_index(self):
        """dict mapping a sorted vertex pair to its edge id."""
        if "edge_index" not in self._cache:
            self._cache["edge_index"] = {
                (int(u), int(v)): i for i, (u, v) in enumerate(self.edges)
            }
        return self._cache["edge_index"]

    @property
    def boundary_edge_mask(self):
        return self.edge_counts == 1

    @property
    def vertex_on_boundary(self):
        if "vertex_on_boundary" not in self._cache:
            mask = np.zeros(self.n_vertices, dtype=bool)
            be = self.edges[self.boundary_edge_mask]
            mask[be.ravel()] = True
            self._cache["vertex_on_boundary"] = mask
        return self._cache["vertex_on_boundary"]

    # ------------------------------------------------------------------
    # ordered one-rings

    def _build_rings(self):
        """Order each vertex's neighbours around it, following orientation.

        Every triangle (a, b, c) makes c the ring-successor of b at a
        (and cyclically).  Interior manifold vertices give one cycle,
        boundary vertices one open chain; anything else is a pinch and
        raises.
        """
        t = self.triangles
        nv = self.n_vertices
        center = np.concatenate([t[:, 0], t[:, 1], t[:, 2]])
        nxt_from = np.concatenate([t[:, 1], t[:, 2], t[:, 0]])
        nxt_to = np.concatenate([t[:, 2], t[:, 0], t[:, 1]])
        order = np.argsort(center, kind="stable")
        starts = np.searchsorted(center[order], np.arange(nv + 1))
        indptr = [0]
        ring = []
        closed = np.zeros(nv, dtype=np.uint8)
        for v in range(nv):
            sl = order[starts[v]:starts[v + 1]]
            if len(sl) == 0:
                raise MeshValidationError(f"vertex {v} belongs to no triangle")
            succ = {}
            for k in sl:
                a, b = int(nxt_from[k]), int(nxt_to[k])
                if a in succ:
                    raise MeshValidationError(
                        f"non-manifold fan at vertex {v} (duplicate successor)"
                    )
                succ[a] = b
            has_pred = set(succ.values())
            open_starts = [a for a in succ if a not in has_pred]
            if len(open_starts) > 1:
                raise MeshValidationError(f"pinched boundary fan at vertex {v}")
            if open_starts:
                cur = open_starts[0]
            else:
                closed[v] = 1
                cur = min(succ)
            chain = [cur]
            while cur in succ:
                cur = succ.pop(cur)
                if closed[v] and cur == chain[0]:
                    break
                chain.append(cur)
            if succ or len(chain) != len(sl) + (0 if closed[v] else 1):
                raise MeshValidationError(f"non-manifold fan at vertex {v}")
            ring.extend(chain)
            indptr.append(len(ring))
        self._cache["ring_indptr"] = np.asarray(indptr, dtype=np.int64)
        self._cache["ring_verts"] = np.asarray(ring, dtype=np.int64)
        self._cache["ring_closed"] = closed

    def _ring_item(self, key):
        if key not in self._cache:
            self._build_rings()
        return self._cache[key]

    @property
    def ring_indptr(self):
        return self._ring_item("ring_indptr")

    @property
    def ring_verts(self):
        return self._ring_item("ring_verts")

    @property
    def ring_closed(self):
        return self._ring_item("ring_closed")

    def vertex_ring(self, v):
        """Ordered neighbours of ``v`` (cyclic iff ``ring_closed[v]``)."""
        return self.ring_verts[self.ring_indptr[v]:self.ring_indptr[v + 1]]

    @property
    def vertex_adjacency(self):
        """Symmetric sparse adjacency matrix (csr) of the vertex graph."""
        if "vertex_adjacency" not in self._cache:
            e = self.edges
            data = np.ones(2 * len(e), dtype=np.int8)
            ij = np.concatenate([e, e[:, ::-1]])
            adj = sparse.csr_matrix(
                (data, (ij[:, 0], ij[:, 1])),
                shape=(self.n_vertices, self.n_vertices),
            )
            self._cache["vertex_adjacency"] = adj
        return self._cache["vertex_adjacency"]

    # ------------------------------------------------------------------
    # boundary loops

    def boundary_components(self):
        """Boundary loops as lists of vertex ids in walk order."""
        if "boundary_loops" in self._cache:
            return self._cache["boundary_loops"]
        he = self._edge_item("halfedges")
        und = np.sort(he, axis=1)
        _, inverse = np.unique(und, axis=0, return_inverse=True)
        inverse = inverse.ravel()
        bmask = self.boundary_edge_mask
        nxt = {}
        for k in np.nonzero(bmask[inverse])[0]:
            u, v = int(he[k, 0]), int(he[k, 1])
            # walk against the interior orientation: v -> u
            if v in nxt:
                raise MeshValidationError(f"non-manifold boundary at vertex {v}")
            nxt[v] = u
        loops = []
        seen = set()
        for start in sorted(nxt):
            if start in seen:
                continue
            loop = [start]
            seen.add(start)
            cur = nxt[start]
            while cur != start:
                if cur in seen:
                    raise MeshValidationError(
                        f"boundary walk revisits vertex {cur}"
                    )
                loop.append(cur)
                seen.add(cur)
                cur = nxt[cur]
            loops.append(np.asarray(loop, dtype=np.int64))
        self._cache["boundary_loops"] = loops
        return loops

    def is_closed(self):
        return not self.boundary_edge_mask.any()

    # ------------------------------------------------------------------
    # components and submeshes

    def connected_face_components(self):
        """Connected components of the face adjacency graph.

        Returns a list of sorted face-id arrays, ordered by their
        smallest face id.
        """
        et = self.edge_tris
        both = self.edge_counts == 2
        g = sparse.csr_matrix(
            (
                np.ones(both.sum(), dtype=np.int8),
                (et[both, 0], et[both, 1]),
            ),
            shape=(self.n_triangles, self.n_triangles),
        )
        n, labels = sparse.csgraph.connected_components(g, directed=False)
        comps = [np.nonzero(labels == i)[0] for i in range(n)]
        comps.sort(key=lambda c: int(c[0]))
        return comps

    def submesh(self, face_ids):
        """Extract the faces ``face_ids`` as a new mesh.

        Returns (mesh, vertex_ids) where ``vertex_ids[i]`` is the index
        in this mesh of the submesh's vertex ``i``.  Vertex order is
        ascending in the original ids, so index tie-breaking orders are
        preserved.
        """
        face_ids = np.asarray(face_ids, dtype=np.int64)
        tris = self.triangles[face_ids]
        vertex_ids = np.unique(tris)
        remap = np.full(self.n_vertices, -1, dtype=np.int64)
        remap[vertex_ids] = np.arange(len(vertex_ids))
        return TriMesh(self.vertices[vertex_ids], remap[tris]), vertex_ids

    # ------------------------------------------------------------------
    # validation

    def _check_orientation(self):
        """Raise unless directed halfedges are pairwise distinct."""
        he = self._edge_item("halfedges")
        uniq = np.unique(he, axis=0)
        if len(uniq) == len(he):
            return
        # Distinguish a fixable inconsistency from true non-orientability
        # by 2-colouring faces across shared edges.
        ok = self._orientation_2colourable()
        dup = he[np.lexsort((he[:, 1], he[:, 0]))]
        first_dup = dup[np.nonzero((np.diff(dup, axis=0) == 0).all(axis=1))[0][0]]
        kind = "inconsistently oriented" if ok else "non-orientable"
        raise MeshValidationError(
            f"{kind}: directed edge {tuple(int(x) for x in first_dup)} "
            "appears twice"
        )

    def _orientation_2colourable(self):
        flip = np.full(self.n_triangles, -1, dtype=np.int8)
        et = self.edge_tris
        for start in range(self.n_triangles):
            if flip[start] >= 0:
                continue
            flip[start] = 0
            stack = [start]
            while stack:
                f = stack.pop()
                for e in self.tri_edges[f]:
                    f2 = et[e, 0] if et[e, 1] == f else et[e, 1]
                    if f2 < 0:
                        continue
                    u, v = (int(x) for x in self.edges[e])
                    # faces agree iff they traverse the shared edge in
                    # opposite directions
                    dir_f = self._edge_direction_in_face(f, u, v)
                    dir_f2 = self._edge_direction_in_face(f2, u, v)
                    want = flip[f] if dir_f != dir_f2 else 1 - flip[f]
                    if flip[f2] < 0:
                        flip[f2] = want
                        stack.append(f2)
                    elif flip[f2] != want:
                        return False
        return True

    def _edge_direction_in_face(self, f, u, v):
        t = self.triangles[f]
        for a, b in ((0, 1), (1, 2), (2, 0)):
            if t[a] == u and t[b] == v:
                return 1
            if t[a] == v and t[b] == u:
                return 0
        raise AssertionError("edge not in face")

    def validate(self):
        """Full manifold/orientation/connectivity check.

        Returns
        -------
        SurfaceType
            (genus, boundary_count) of the surface.

        Raises
        ------
        MeshValidationError
            On non-manifold edges or vertices, inconsistent orientation,
            non-orientability, or a disconnected mesh, naming the
            offending simplex.
        """
        bad = np.nonzero(self.edge_counts > 2)[0]
        if len(bad):
            u, v = (int(x) for x in self.edges[bad[0]])
            raise MeshValidationError(
                f"non-manifold edge ({u},{v}) with {int(self.edge_counts[bad[0]])} "
                "incident triangles"
            )
        self._check_orientation()
        if "ring_indptr" not in self._cache:
            self._build_rings()
        comps = self.connected_face_components()
        if len(comps) != 1:
            raise MeshValidationError(
                f"mesh has {len(comps)} connected components"
            )
        referenced = np.zeros(self.n_vertices, dtype=bool)
        referenced[self.triangles.ravel()] = True
        if not referenced.all():
            raise MeshValidationError(
                f"vertex {int(np.nonzero(~referenced)[0][0])} is isolated"
            )
        loops = self.boundary_components()
        return SurfaceType.from_euler(self.euler_characteristic(), len(loops))


# ----------------------------------------------------------------------
# module-level conveniences mirroring the class API


def validate_mesh(mesh):
    """Validate ``mesh`` and return its :class:`SurfaceType`."""
    return mesh.validate()


def euler_characteristic(mesh):
    return mesh.euler_characteristic()


def boundary_components(mesh):
    return mesh.boundary_components()


def split_components(mesh):
    """Split a possibly disconnected mesh into connected submeshes.

    Returns a list of (mesh, face_ids, vertex_ids) triples referring
    back to the input numbering.
    """
    out = []
    for faces in mesh.connected_face_components():
        sub, verts = mesh.submesh(faces)
        out.append((sub, faces, verts))
    return out
