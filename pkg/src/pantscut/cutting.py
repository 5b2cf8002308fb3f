"""Cutting a mesh along level-set circles and vertex loops.

Iso cuts are batched: every triangle is remeshed once against all the
levels that cross it, producing separated components in a single pass.
Each crossing point is inserted twice (a "lo" copy kept by the piece
below the level and a "hi" copy kept by the piece above), so the result
falls apart into components without any further surgery.  Vertex-loop
cuts duplicate the loop vertices and split their triangle fans.

Both operations preserve the total Euler characteristic exactly, which
is asserted on every call.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .errors import DecompositionError, PantscutError
from .mesh import TriMesh

_EVEN_PERMS = {(0, 1, 2), (1, 2, 0), (2, 0, 1)}


@dataclass
class CutCurve:
    """A closed cutting curve.

    iso curves carry ``points`` as (u, v, t) triples --- a point on the
    mesh edge u-v at parameter t from u, with u on the below side ---
    plus the rank ``threshold`` and representative ``level`` value.
    Loop curves carry ``points`` as a plain vertex-id list.
    """

    kind: str  # "iso" | "loop"
    points: list
    level: float | None = None
    threshold: int | None = None
    positions: np.ndarray | None = None

    def __len__(self):
        return len(self.points)

    def compute_positions(self, vertices):
        """Resolve 3-space coordinates against the host mesh's vertices."""
        if self.kind == "loop":
            self.positions = np.asarray(vertices)[np.asarray(self.points, dtype=int)]
        else:
            pts = np.empty((len(self.points), 3))
            for i, (u, v, t) in enumerate(self.points):
                pts[i] = (1.0 - t) * vertices[u] + t * vertices[v]
            self.positions = pts
        return self.positions


@dataclass
class SliceResult:
    mesh: TriMesh
    values: np.ndarray          # transported field values on the sliced mesh
    face_origin: np.ndarray     # input face id per sliced face
    vertex_origin: np.ndarray   # input vertex id, -1 for inserted cut points
    curve_pairs: list           # per curve: [(lo_id, hi_id), ...] in point order
    components: list            # face-id arrays, one per connected component
    comp_of_face: np.ndarray
    comp_band: np.ndarray | None = None  # band index per component, if requested
    curve_lo_comp: np.ndarray | None = None  # component on each curve's below side
    curve_hi_comp: np.ndarray | None = None

    @property
    def n_components(self):
        return len(self.components)

    def component_piece(self, comp_ids, internal_curves=()):
        return merged_submesh(self, comp_ids, internal_curves)


def _edge_crossings(mesh, field, curves):
    """Group curve points by mesh edge, sorted by threshold along the edge."""
    idx = mesh.edge_index
    rank = field.rank
    by_edge = {}
    seen = set()
    for cid, curve in enumerate(curves):
        if curve.kind != "iso":
            raise DecompositionError("batch slicing handles iso curves only")
        k = curve.threshold
        for pid, (u, v, t) in enumerate(curve.points):
            key = (u, v) if u < v else (v, u)
            e = idx.get(key)
            if e is None:
                raise DecompositionError(f"curve point on non-edge {key}")
            if (e, k) in seen:
                raise DecompositionError(
                    f"two curves cross edge {key} at the same level"
                )
            seen.add((e, k))
            if not (rank[u] <= k < rank[v]):
                raise DecompositionError(
                    f"curve point on edge {key} does not straddle its level"
                )
            by_edge.setdefault(e, []).append((k, cid, pid, u, v, t))
    for lst in by_edge.values():
        lst.sort()
    return by_edge


def _sorted_frame(corners, rank):
    order = np.argsort(rank[corners], kind="stable")
    even = tuple(order) in _EVEN_PERMS
    return corners[order], even


def slice_along_curves(mesh, field, curves, compute_bands=False):
    """Remesh along all iso curves at once and separate the pieces.

    Every curve point spawns a lo/hi vertex pair at the same position;
    triangles are re-triangulated between consecutive levels so that the
    below and above sides share no vertices.  Field values transport to
    the pieces (cut points take their curve's level value).
    """
    rank = field.rank
    nv = mesh.n_vertices
    by_edge = _edge_crossings(mesh, field, curves)

    lo_id = {}  # (edge, threshold) -> lo vertex id; hi is always lo + 1
    new_pos = []
    new_vals = []
    curve_pairs = [[] for _ in curves]
    pair_of_point = [[None] * len(c.points) for c in curves]
    for e in sorted(by_edge):
        for k, cid, pid, u, v, t in by_edge[e]:
            p = (1.0 - t) * mesh.vertices[u] + t * mesh.vertices[v]
            vid = nv + len(new_pos)
            lo_id[(e, k)] = vid
            new_pos.extend([p, p])
            new_vals.extend([curves[cid].level] * 2)
            pair_of_point[cid][pid] = (vid, vid + 1)
    for cid, pairs in enumerate(pair_of_point):
        curve_pairs[cid] = [p for p in pairs]

    crossed_faces = set()
    for e in by_edge:
        for t in mesh.edge_tris[e]:
            if t >= 0:
                crossed_faces.add(int(t))

    def edge_list(a, b):
        e = mesh.edge_index[(a, b) if a < b else (b, a)]
        return [(k, lo_id[(e, k)]) for k, *_ in by_edge.get(e, ())]

    new_faces = []
    face_origin = []

    def emit(f, tri, even):
        new_faces.append(tri if even else (tri[0], tri[2], tri[1]))
        face_origin.append(f)

    def emit_fan(f, poly, even):
        for i in range(1, len(poly) - 1):
            emit(f, (poly[0], poly[i], poly[i + 1]), even)

    for f in range(mesh.n_triangles):
        if f not in crossed_faces:
            new_faces.append(tuple(mesh.triangles[f]))
            face_origin.append(f)
            continue
        (a, b, c), even = _sorted_frame(mesh.triangles[f], rank)
        lab, lac, lbc = edge_list(a, b), edge_list(a, c), edge_list(b, c)
        s, r = len(lab), len(lbc)
        if [k for k, _ in lab] + [k for k, _ in lbc] != [k for k, _ in lac]:
            raise DecompositionError(
                f"face {f}: curves cross its edges inconsistently"
            )
        ab_lo = [x for _, x in lab]
        ac_lo = [x for _, x in lac]
        bc_lo = [x for _, x in lbc]
        if s > 0:
            emit(f, (a, ab_lo[0], ac_lo[0]), even)
        else:
            emit_fan(f, (a, b, bc_lo[0], ac_lo[0]), even)
        for i in range(1, s):
            emit_fan(f, (ab_lo[i - 1] + 1, ab_lo[i], ac_lo[i], ac_lo[i - 1] + 1), even)
        if s > 0 and r > 0:
            emit_fan(
                f,
                (ab_lo[s - 1] + 1, b, bc_lo[0], ac_lo[s], ac_lo[s - 1] + 1),
                even,
            )
        elif s > 0:
            emit_fan(f, (ab_lo[s - 1] + 1, b, c, ac_lo[s - 1] + 1), even)
        for j in range(1, r):
            emit_fan(
                f,
                (bc_lo[j - 1] + 1, bc_lo[j], ac_lo[s + j], ac_lo[s + j - 1] + 1),
                even,
            )
        if r > 0:
            emit(f, (bc_lo[r - 1] + 1, c, ac_lo[s + r - 1] + 1), even)

    vertices = (
        np.vstack([mesh.vertices, np.asarray(new_pos)])
        if new_pos
        else mesh.vertices.copy()
    )
    values = np.concatenate([field.values, np.asarray(new_vals, dtype=np.float64)])
    sliced = TriMesh(vertices, np.asarray(new_faces, dtype=np.int64))
    if sliced.euler_characteristic() != mesh.euler_characteristic():
        raise PantscutError("slicing changed the Euler characteristic")

    vertex_origin = np.concatenate(
        [np.arange(nv, dtype=np.int64), np.full(len(new_pos), -1, dtype=np.int64)]
    )
    components = sliced.connected_face_components()
    comp_of_face = np.empty(sliced.n_triangles, dtype=np.int64)
    for ci, faces in enumerate(components):
        comp_of_face[faces] = ci
    comp_of_vertex = np.full(sliced.n_vertices, -1, dtype=np.int64)
    for ci, faces in enumerate(components):
        comp_of_vertex[sliced.triangles[faces].ravel()] = ci

    n_curves = len(curves)
    curve_lo = np.full(n_curves, -1, dtype=np.int64)
    curve_hi = np.full(n_curves, -1, dtype=np.int64)
    for cid, pairs in enumerate(curve_pairs):
        lo_comps = {int(comp_of_vertex[lo]) for lo, _ in pairs}
        hi_comps = {int(comp_of_vertex[hi]) for _, hi in pairs}
        if len(lo_comps) != 1 or len(hi_comps) != 1:
            raise PantscutError(f"curve {cid} does not bound single components")
        curve_lo[cid] = lo_comps.pop()
        curve_hi[cid] = hi_comps.pop()

    comp_band = None
    if compute_bands:
        thresholds = sorted({c.threshold for c in curves})
        t_arr = np.asarray(thresholds, dtype=np.int64)
        level_index = {k: i for i, k in enumerate(thresholds)}
        vert_band = np.full(sliced.n_vertices, -1, dtype=np.int64)
        orig = vertex_origin >= 0
        vert_band[orig] = np.searchsorted(t_arr, rank[vertex_origin[orig]])
        for cid, pairs in enumerate(curve_pairs):
            li = level_index[curves[cid].threshold]
            for lo, hi in pairs:
                vert_band[lo] = li
                vert_band[hi] = li + 1
        comp_band = np.full(len(components), -1, dtype=np.int64)
        for ci, faces in enumerate(components):
            bands = np.unique(vert_band[sliced.triangles[faces].ravel()])
            if len(bands) != 1:
                raise PantscutError(f"component {ci} spans several bands: {bands}")
            comp_band[ci] = bands[0]

    return SliceResult(
        sliced,
        values,
        np.asarray(face_origin, dtype=np.int64),
        vertex_origin,
        curve_pairs,
        components,
        comp_of_face,
        comp_band,
        curve_lo,
        curve_hi,
    )


def merged_submesh(result, comp_ids, internal_curves=()):
    """Extract components, regluing the lo/hi seams of the given curves.

    Returns (mesh, values, global_face_ids, global_vertex_ids); local
    vertex order follows ascending global id, so symbolic tie order is
    preserved.  The hi copy of every reglued pair collapses onto its lo
    partner.
    """
    faces = np.concatenate([result.components[c] for c in sorted(set(comp_ids))])
    faces.sort()
    tris = result.mesh.triangles[faces]
    if len(internal_curves):
        remap = np.arange(result.mesh.n_vertices, dtype=np.int64)
        for cid in internal_curves:
            for lo, hi in result.curve_pairs[cid]:
                remap[hi] = lo
        tris = remap[tris]
    used = np.unique(tris)
    local = np.full(result.mesh.n_vertices, -1, dtype=np.int64)
    local[used] = np.arange(len(used), dtype=np.int64)
    mesh = TriMesh(result.mesh.vertices[used], local[tris])
    return mesh, result.values[used], faces, used


def cut_along_iso_curves(mesh, field, curves):
    """Slice and return the resulting component meshes (largest first mesh
    order is component order)."""
    result = slice_along_curves(mesh, field, curves)
    return [
        merged_submesh(result, [c])[0] for c in range(result.n_components)
    ]


def cut_along_path_loop(mesh, loop, values=None):
    """Cut open along a simple closed vertex loop.

    Each loop vertex is duplicated; its triangle fan splits into the two
    sides of the loop (the side containing the lowest face id keeps the
    original vertex).  Returns (mesh, values, pairs) where pairs maps
    each loop vertex to its duplicate.
    """
    loop = np.asarray(loop, dtype=np.int64)
    k = len(loop)
    if k < 3 or len(np.unique(loop)) != k:
        raise DecompositionError("cut loop must be simple with >= 3 vertices")
    if mesh.vertex_on_boundary[loop].any():
        raise DecompositionError("cut loop touches the mesh boundary")
    idx = mesh.edge_index
    for i in range(k):
        a, b = int(loop[i]), int(loop[(i + 1) % k])
        if ((a, b) if a < b else (b, a)) not in idx:
            raise DecompositionError(f"loop step ({a},{b}) is not a mesh edge")

    tris = mesh.triangles
    order = np.argsort(tris.ravel(), kind="stable")
    flat_faces = np.repeat(np.arange(mesh.n_triangles), 3)[order]
    starts = np.searchsorted(tris.ravel()[order], np.arange(mesh.n_vertices))
    ends = np.searchsorted(tris.ravel()[order], np.arange(mesh.n_vertices) + 1)

    new_tris = tris.copy()
    new_pos = [mesh.vertices]
    new_vals = [np.asarray(values)] if values is not None else None
    pairs = []
    next_id = mesh.n_vertices
    on_loop = {int(v): i for i, v in enumerate(loop)}
    for li, v in enumerate(map(int, loop)):
        prev_v = int(loop[(li - 1) % k])
        next_v = int(loop[(li + 1) % k])
        fan = flat_faces[starts[v]:ends[v]]
        # group fan faces joined across non-loop edges at v
        label = {int(f): int(f) for f in fan}

        def find(x):
            while label[x] != x:
                label[x] = label[label[x]]
                x = label[x]
            return x

        by_other = {}
        for f in map(int, fan):
            for w in tris[f]:
                w = int(w)
                if w != v and w != prev_v and w != next_v:
                    by_other.setdefault(w, []).append(f)
        for fs in by_other.values():
            for f in fs[1:]:
                ra, rb = find(fs[0]), find(f)
                if ra != rb:
                    label[max(ra, rb)] = min(ra, rb)
        sides = sorted({find(int(f)) for f in fan})
        if len(sides) != 2:
            raise DecompositionError(
                f"loop vertex {v}: fan splits into {len(sides)} parts, not 2"
            )
        dup = next_id
        next_id += 1
        pairs.append((v, dup))
        for f in map(int, fan):
            if find(f) == sides[1]:
                row = new_tris[f]
                row[row == v] = dup
        new_pos.append(mesh.vertices[v][None, :])
        if new_vals is not None:
            new_vals.append(np.asarray(values)[v : v + 1])

    out = TriMesh(np.vstack(new_pos), new_tris)
    if out.euler_characteristic() != mesh.euler_characteristic():
        raise PantscutError("loop cut changed the Euler characteristic")
    vals_out = np.concatenate(new_vals) if new_vals is not None else None
    return out, vals_out, pairs
