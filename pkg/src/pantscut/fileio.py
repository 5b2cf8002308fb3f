"""Mesh and result serialisation.

ASCII OFF and OBJ meshes in and out (OBJ texture/normal records are
ignored on input and never written), PLY with a per-face integer patch
label for segmentation output, JSON reports for decompositions, Morse
classifications and Reeb graphs.  All writers are deterministic: the
same data produces byte-identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import MeshValidationError
from .mesh import TriMesh


def _fmt(x):
    """Shortest round-trip decimal form, stable across runs."""
    return repr(float(x))


# ----------------------------------------------------------------------
# OFF


def load_off(path):
    with open(path, "r", encoding="ascii") as fh:
        tokens = []
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                tokens.extend(line.split())
    if not tokens or tokens[0] != "OFF":
        raise MeshValidationError(f"{path}: missing OFF header")
    try:
        nv, nf = int(tokens[1]), int(tokens[2])
        pos = 4  # V F E
        verts = np.asarray(tokens[pos:pos + 3 * nv], dtype=np.float64)
        verts = verts.reshape(nv, 3)
        pos += 3 * nv
        tris = np.empty((nf, 3), dtype=np.int64)
        for i in range(nf):
            k = int(tokens[pos])
            if k != 3:
                raise MeshValidationError(
                    f"{path}: face {i} has {k} vertices; triangulate first"
                )
            tris[i] = [int(t) for t in tokens[pos + 1:pos + 4]]
            pos += 1 + k
    except (ValueError, IndexError) as exc:
        raise MeshValidationError(f"{path}: malformed OFF ({exc})") from exc
    return TriMesh(verts, tris)


def save_off(path, mesh):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_triangles} 0\n")
        for p in mesh.vertices:
            fh.write(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        for t in mesh.triangles:
            fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")


# ----------------------------------------------------------------------
# OBJ


def load_obj(path):
    verts = []
    tris = []
    with open(path, "r", encoding="ascii") as fh:
        for ln, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if parts[0] == "v":
                if len(parts) < 4:
                    raise MeshValidationError(f"{path}:{ln}: short vertex record")
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                refs = parts[1:]
                if len(refs) != 3:
                    raise MeshValidationError(
                        f"{path}:{ln}: face has {len(refs)} vertices; "
                        "triangulate first"
                    )
                face = []
                for r in refs:
                    i = int(r.split("/", 1)[0])
                    if i < 0:
                        i = len(verts) + i
                    else:
                        i = i - 1
                    face.append(i)
                tris.append(face)
            # vt / vn / vp / usemtl / o / g / s / mtllib: ignored
    if not verts or not tris:
        raise MeshValidationError(f"{path}: no mesh data")
    return TriMesh(
        np.asarray(verts, dtype=np.float64), np.asarray(tris, dtype=np.int64)
    )


def save_obj(path, mesh):
    with open(path, "w", encoding="ascii") as fh:
        for p in mesh.vertices:
            fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        for t in mesh.triangles:
            fh.write(f"f {t[0] + 1} {t[1] + 1} {t[2] + 1}\n")


def load_mesh(path):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        return load_off(path)
    if ext == ".obj":
        return load_obj(path)
    raise MeshValidationError(f"{path}: unsupported mesh format {ext!r}")


def save_mesh(path, mesh):
    ext = os.path.splitext(path)[1].lower()
    if ext == ".off":
        return save_off(path, mesh)
    if ext == ".obj":
        return save_obj(path, mesh)
    raise MeshValidationError(f"{path}: unsupported mesh format {ext!r}")


# ----------------------------------------------------------------------
# PLY with face labels


def save_ply(path, mesh, face_labels=None):
    with open(path, "w", encoding="ascii") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {mesh.n_vertices}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        fh.write(f"element face {mesh.n_triangles}\n")
        fh.write("property list uchar int vertex_indices\n")
        if face_labels is not None:
            fh.write("property int patch\n")
        fh.write("end_header\n")
        for p in mesh.vertices:
            fh.write(f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        if face_labels is None:
            for t in mesh.triangles:
                fh.write(f"3 {t[0]} {t[1]} {t[2]}\n")
        else:
            for t, lab in zip(mesh.triangles, face_labels):
                fh.write(f"3 {t[0]} {t[1]} {t[2]} {lab}\n")


# ----------------------------------------------------------------------
# decomposition reports


def segmentation_dict(dec):
    """The segmentation report; patch face ids index the combined mesh."""
    st = dec.source_type
    out = {
        "surface_type": {
            "g": st.genus,
            "b": st.boundary_count,
            "chi": st.euler_characteristic,
        },
        "patches": [],
        "curves": [],
    }
    off = 0
    for p in dec.patches:
        nf = p.mesh.n_triangles
        out["patches"].append(
            {
                "id": p.id,
                "type": {
                    "g": p.surface_type.genus,
                    "b": p.surface_type.boundary_count,
                },
                "face_ids": list(range(off, off + nf)),
            }
        )
        off += nf
    for i, c in enumerate(dec.curves):
        rec = {"id": i, "kind": c.kind}
        if c.kind == "iso":
            rec["level"] = float(c.level)
            rec["points"] = [
                {"edge": [int(u), int(v)], "t": float(t)}
                for (u, v, t) in c.points
            ]
        else:
            rec["points"] = [{"vertex": int(v)} for v in c.points]
        out["curves"].append(rec)
    return out


def save_segmentation(path, dec):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(segmentation_dict(dec), fh, indent=2, sort_keys=True)
        fh.write("\n")


def save_patches(directory, dec):
    """One OFF per patch: patch_000.off, patch_001.off, ..."""
    os.makedirs(directory, exist_ok=True)
    paths = []
    for p in dec.patches:
        fp = os.path.join(directory, f"patch_{p.id:03d}.off")
        save_off(fp, p.mesh)
        paths.append(fp)
    return paths


def critical_report_dict(report):
    return [
        {
            "vertex": c.vertex,
            "kind": c.kind,
            "multiplicity": c.multiplicity,
            "value": float(c.value),
        }
        for c in report.criticals
    ]


# ----------------------------------------------------------------------
# Reeb graph dumps


def reeb_graph_dict(graph):
    nodes = []
    for nid in sorted(graph.nodes):
        n = graph.nodes[nid]
        rec = {"id": n.id, "kind": n.kind, "value": float(n.value)}
        if n.vertex >= 0:
            rec["vertex"] = n.vertex
        if n.boundary_comp >= 0:
            rec["boundary_component"] = n.boundary_comp
        if n.multiplicity:
            rec["multiplicity"] = n.multiplicity
        nodes.append(rec)
    arcs = []
    for aid in sorted(graph.arcs):
        a = graph.arcs[aid]
        lo = float(graph.nodes[a.lower].value)
        hi = float(graph.nodes[a.upper].value)
        arcs.append(
            {
                "id": a.id,
                "lower": a.lower,
                "upper": a.upper,
                "value_range": [min(lo, hi), max(lo, hi)],
            }
        )
    return {"nodes": nodes, "arcs": arcs}


def save_reeb_json(path, graph):
    with open(path, "w", encoding="ascii") as fh:
        json.dump(reeb_graph_dict(graph), fh, indent=2, sort_keys=True)
        fh.write("\n")


def reeb_dot(graph):
    lines = ["graph reeb {"]
    for nid in sorted(graph.nodes):
        n = graph.nodes[nid]
        extra = f" m={n.multiplicity}" if n.multiplicity > 1 else ""
        lines.append(
            f'  n{n.id} [label="{n.kind}{extra} v={_fmt(n.value)}"];'
        )
    for aid in sorted(graph.arcs):
        a = graph.arcs[aid]
        lines.append(f"  n{a.lower} -- n{a.upper};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def save_reeb_dot(path, graph):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(reeb_dot(graph))
