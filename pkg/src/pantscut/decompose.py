"""Pants decompositions of surfaces with negative Euler characteristic.

Two routes to the same result:

* ``handle_decompose`` sweeps a scalar field upward and cuts full level
  sets between consecutive critical events, keeping only the gaps where
  both the part below and the part above are already complex enough
  (accumulated characteristic <= -1 on each side).  The resulting bands
  fall apart into pants, cylinders --- which are glued back onto the
  patch below --- and at most two genus-1 end pieces, which are opened
  up along a monotone loop through one of their saddles.

* ``reeb_decompose`` builds the Reeb graph, prunes extremum leaves,
  splices degree-2 nodes and cuts one level circle in the middle of
  every arc joining two branch nodes.

A decomposition of a type (g, b) surface has 2g-2+b pants patches and
3g-3+b cutting curves; ``validate_decomposition`` re-checks every patch
from scratch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import reeb as reeb_mod
from .cutting import (
    CutCurve,
    cut_along_path_loop,
    merged_submesh,
    slice_along_curves,
)
from .errors import DecompositionError, UnsupportedDecomposition
from .fields import (
    ScalarField,
    default_extrema_constraints,
    solve_boundary_aware,
    solve_harmonic,
)
from .mesh import SurfaceType, TriMesh
from .morse import classify_vertices, extract_level_set, gap_levels, saddle_loop

MAX_LOOP_ATTEMPTS = 6


@dataclass
class Patch:
    id: int
    mesh: TriMesh
    surface_type: SurfaceType
    source_faces: np.ndarray  # input-mesh face id per patch face


@dataclass
class PantsDecomposition:
    source_type: SurfaceType
    algorithm: str
    patches: list
    curves: list

    @property
    def n_patches(self):
        return len(self.patches)

    @property
    def n_curves(self):
        return len(self.curves)

    def combined(self):
        """Disjoint union of the patch meshes plus a face -> patch label."""
        verts = []
        tris = []
        labels = []
        off = 0
        for p in self.patches:
            verts.append(p.mesh.vertices)
            tris.append(p.mesh.triangles + off)
            labels.append(np.full(p.mesh.n_triangles, p.id, dtype=np.int64))
            off += p.mesh.n_vertices
        return (
            TriMesh(np.vstack(verts), np.vstack(tris)),
            np.concatenate(labels),
        )


def expected_counts(surface_type):
    """(number of pants, number of curves) for a full decomposition."""
    g, b = surface_type.genus, surface_type.boundary_count
    return 2 * g - 2 + b, 3 * g - 3 + b


@dataclass
class ValidationReport:
    ok: bool
    problems: list
    patch_types: list
    n_patches: int
    n_curves: int

    def __bool__(self):
        return self.ok


def validate_decomposition(dec, source_mesh=None):
    """Re-derive every patch type and check the global count identities."""
    problems = []
    types = []
    for p in dec.patches:
        try:
            t = p.mesh.validate()
        except Exception as exc:  # noqa: BLE001 - collect, don't mask others
            problems.append(f"patch {p.id}: invalid mesh ({exc})")
            types.append(None)
            continue
        types.append(t)
        if (t.genus, t.boundary_count) != (0, 3):
            problems.append(f"patch {p.id}: type {t}, expected (0,3)")
    want_p, want_c = expected_counts(dec.source_type)
    if dec.n_patches != want_p:
        problems.append(f"{dec.n_patches} patches, expected {want_p}")
    if dec.n_curves != want_c:
        problems.append(f"{dec.n_curves} curves, expected {want_c}")
    chi = sum(p.mesh.euler_characteristic() for p in dec.patches)
    if chi != dec.source_type.euler_characteristic:
        problems.append(
            f"patch characteristics sum to {chi}, "
            f"expected {dec.source_type.euler_characteristic}"
        )
    circles = sum(t.boundary_count for t in types if t is not None)
    want_circles = 2 * dec.n_curves + dec.source_type.boundary_count
    if None not in types and circles != want_circles:
        problems.append(
            f"patch boundary circles total {circles}, expected {want_circles}"
        )
    if source_mesh is not None:
        covered = np.zeros(source_mesh.n_triangles, dtype=bool)
        for p in dec.patches:
            covered[p.source_faces] = True
        if not covered.all():
            problems.append(
                f"{np.count_nonzero(~covered)} input faces missing from patches"
            )
    return ValidationReport(not problems, problems, types,
                            dec.n_patches, dec.n_curves)


# ----------------------------------------------------------------------
# field defaults and sanity


def default_field(mesh, surface_type=None):
    """The scalar field the decomposers use when none is supplied."""
    st = surface_type or mesh.validate()
    if st.boundary_count == 0:
        return solve_harmonic(mesh, default_extrema_constraints(mesh))
    if st.boundary_count == 1:
        return solve_boundary_aware(mesh, "one_boundary")
    return solve_boundary_aware(mesh, "multi_boundary")


def _check_boundary_field(mesh, surface_type, field):
    """Boundary circles must be level sets sitting outside the interior range."""
    b = surface_type.boundary_count
    if not b:
        return
    interior = ~mesh.vertex_on_boundary
    vmin = field.values[interior].min()
    vmax = field.values[interior].max()
    for j, loop in enumerate(mesh.boundary_components()):
        vals = field.values[loop]
        if vals.min() != vals.max():
            raise DecompositionError(
                f"field is not constant on boundary component {j}"
            )
        if not (vals[0] < vmin or vals[0] > vmax):
            raise DecompositionError(
                f"boundary component {j} sits at value {vals[0]}, inside "
                "the interior range; it must be strictly below or above"
            )


def _check_sweep_field(mesh, surface_type, field, report):
    """The structural conditions the handle sweep relies on."""
    b = surface_type.boundary_count
    _check_boundary_field(mesh, surface_type, field)
    n_min, n_max = report.n_min, report.n_max
    if b == 0 and (n_min != 1 or n_max != 1):
        raise DecompositionError(
            f"sweep needs exactly one minimum and one maximum on a closed "
            f"surface; found {n_min} and {n_max} (solve a harmonic field "
            "with two extremum constraints)"
        )
    if b == 1 and (n_min != 0 or n_max != 1):
        raise DecompositionError(
            f"with one boundary circle the sweep needs no interior minimum "
            f"and one interior maximum; found {n_min} and {n_max}"
        )
    if b >= 2 and (n_min != 0 or n_max != 0):
        raise DecompositionError(
            f"with {b} boundary circles the sweep needs no interior "
            f"extrema; found {n_min} minima and {n_max} maxima"
        )


# ----------------------------------------------------------------------
# the handle route


def _select_gaps(report):
    """Gaps between consecutive events worth cutting.

    Walking up, a piece is only worth separating once the part below it
    has accumulated characteristic <= -1 (a pants or worse); same for
    the part above, walking down.  Extrema contribute +1, a saddle of
    multiplicity m contributes -m, boundary circles contribute 0.
    """
    crits = report.criticals
    contrib = [1 if c.kind in ("min", "max") else -c.multiplicity
               for c in crits]
    prefix = np.cumsum(contrib)
    suffix = np.cumsum(contrib[::-1])[::-1]
    return [
        i for i in range(len(crits) - 1)
        if prefix[i] <= -1 and suffix[i + 1] <= -1
    ]


def _piece_field(mesh, values):
    return ScalarField(mesh, values)


def _repair_genus_piece(mesh, values, source_faces, ptype):
    """Open a genus-1 piece along a saddle loop, giving a (0, b+2) piece.

    The loop runs through a simple saddle and the piece's interior
    extremum; start-vertex choices and the saddle itself are retried
    until the cut is non-separating.
    """
    local = _piece_field(mesh, values)
    rep = classify_vertices(local)
    if rep.n_min:
        direction = "down"
    elif rep.n_max:
        direction = "up"
    else:
        raise UnsupportedDecomposition(
            "a genus handle spans two cut levels with no interior extremum; "
            "the sweep field cannot open it"
        )
    simple = [c for c in rep.saddles if c.multiplicity == 1]
    if direction == "up":
        simple = simple[::-1]
    if not simple:
        raise UnsupportedDecomposition(
            "genus piece contains no simple saddle to trace a loop through"
        )
    last_error = None
    for sad in simple:
        for attempt in range(MAX_LOOP_ATTEMPTS):
            try:
                loop = saddle_loop(local, sad.vertex, direction, attempt)
                cut, cut_vals, _ = cut_along_path_loop(mesh, loop, values)
            except DecompositionError as exc:
                last_error = exc
                continue
            if len(cut.connected_face_components()) != 1:
                last_error = DecompositionError("loop cut separated the piece")
                continue
            t = cut.validate()
            if t.genus != 0:
                last_error = DecompositionError(f"loop cut left type {t}")
                continue
            curve = CutCurve(kind="loop", points=[int(v) for v in loop])
            curve.compute_positions(mesh.vertices)
            return cut, cut_vals, source_faces, curve
    raise DecompositionError(
        f"could not open genus piece of type {ptype}: {last_error}"
    )


def _finish_piece(mesh, values, source_faces, out_patches, out_curves,
                  depth):
    """Route a glued piece to patch / loop repair / recursion."""
    t = mesh.validate()
    g, b = t.genus, t.boundary_count
    if (g, b) == (0, 3):
        out_patches.append((mesh, t, source_faces))
        return
    if g == 1:
        mesh, values, source_faces, curve = _repair_genus_piece(
            mesh, values, source_faces, t
        )
        out_curves.append(curve)
        t = mesh.validate()
        g, b = t.genus, t.boundary_count
        if (g, b) == (0, 3):
            out_patches.append((mesh, t, source_faces))
            return
    if g == 0 and b >= 4:
        if depth > 8:
            raise DecompositionError("recursion limit exceeded")
        sub = _handle_decompose_checked(
            mesh, default_field(mesh, t), t, depth + 1
        )
        for p in sub.patches:
            out_patches.append(
                (p.mesh, p.surface_type, source_faces[p.source_faces])
            )
        out_curves.extend(sub.curves)
        return
    raise DecompositionError(f"piece of type {t} has no decomposition rule")


def handle_decompose(mesh, field=None):
    """Decompose by sweeping a scalar field and cutting between events."""
    st = mesh.validate()
    if st.euler_characteristic >= 0:
        raise DecompositionError(
            f"surface of type {st} has no pants decomposition"
        )
    if field is None:
        field = default_field(mesh, st)
    return _handle_decompose_checked(mesh, field, st, 0)


def _handle_decompose_checked(mesh, field, st, depth):
    report = classify_vertices(field)
    _check_sweep_field(mesh, st, field, report)

    crits = report.criticals
    levels = gap_levels(field, crits, _select_gaps(report))
    curves = []
    for lvl in levels:
        curves.extend(extract_level_set(field, lvl))
    for c in curves:
        c.compute_positions(mesh.vertices)

    result = slice_along_curves(mesh, field, curves, compute_bands=True)
    types = []
    for ci in range(result.n_components):
        pm, _, _, _ = merged_submesh(result, [ci])
        types.append(pm.validate())

    # cylinders glue back onto the piece across one of their cut circles,
    # preferring the one below
    n = result.n_components
    group = list(range(n))

    def find(i):
        while group[i] != i:
            group[i] = group[group[i]]
            i = group[i]
        return i

    internal = set()
    for ci in range(n):
        if (types[ci].genus, types[ci].boundary_count) != (0, 2):
            continue
        below = [k for k in range(len(curves))
                 if result.curve_hi_comp[k] == ci]
        above = [k for k in range(len(curves))
                 if result.curve_lo_comp[k] == ci]
        if below:
            k = below[0]
            other = int(result.curve_lo_comp[k])
        elif above:
            k = above[0]
            other = int(result.curve_hi_comp[k])
        else:
            raise DecompositionError("cylinder piece bounded by no cut curve")
        internal.add(k)
        ra, rb = find(ci), find(other)
        if ra != rb:
            group[max(ra, rb)] = min(ra, rb)

    members = {}
    for ci in range(n):
        members.setdefault(find(ci), []).append(ci)

    out_patches = []
    out_curves = [curves[k] for k in sorted(set(range(len(curves))) - internal)]
    for root in sorted(members):
        comp_ids = members[root]
        glue = [k for k in internal
                if find(int(result.curve_lo_comp[k])) == root]
        pm, pv, pfaces, _ = merged_submesh(result, comp_ids, glue)
        _finish_piece(pm, pv, result.face_origin[pfaces],
                      out_patches, out_curves, depth)

    patches = [
        Patch(i, m, t, src) for i, (m, t, src) in enumerate(out_patches)
    ]
    return PantsDecomposition(st, "handle", patches, out_curves)


# ----------------------------------------------------------------------
# the Reeb route


def reeb_decompose(mesh, field=None):
    """Decompose by cutting one circle per essential Reeb-graph arc."""
    st = mesh.validate()
    if st.euler_characteristic >= 0:
        raise DecompositionError(
            f"surface of type {st} has no pants decomposition"
        )
    if field is None:
        field = default_field(mesh, st)
    report = classify_vertices(field)
    # Unlike the handle sweep, the Reeb route tolerates any number of
    # interior extrema: retraction prunes the leaves they produce.
    _check_boundary_field(mesh, st, field)

    graph = reeb_mod.compute_reeb(field, report)
    simplified = reeb_mod.smooth_degree2(reeb_mod.retract_leaves(graph))
    cuts = reeb_mod.select_cut_points(simplified)
    curves = [reeb_mod.cut_point_to_curve(graph, c) for c in cuts]
    for c in curves:
        c.compute_positions(mesh.vertices)

    result = slice_along_curves(mesh, field, curves)
    out_patches = []
    out_curves = list(curves)
    for ci in range(result.n_components):
        pm, pv, pfaces, _ = merged_submesh(result, [ci])
        _finish_piece(pm, pv, result.face_origin[pfaces],
                      out_patches, out_curves, 0)

    patches = [
        Patch(i, m, t, src) for i, (m, t, src) in enumerate(out_patches)
    ]
    return PantsDecomposition(st, "reeb", patches, out_curves)


def decompose(mesh, field=None, algorithm="handle"):
    """Entry point: ``algorithm`` is "handle" or "reeb"."""
    if algorithm == "handle":
        return handle_decompose(mesh, field)
    if algorithm == "reeb":
        return reeb_decompose(mesh, field)
    raise ValueError(f"unknown algorithm {algorithm!r}")
