"""Synthetic test surfaces.

Closed genus-g surfaces are built by chaining grid tori with tube
bridges; boundary loops are punched by removing a vertex star.  The
``theta_surface`` fixture is a combinatorial genus-2 surface whose two
junction vertices are true multiplicity-2 (monkey) saddles of the
layered field shipped with it.
"""

from __future__ import annotations

import numpy as np

from .errors import MeshValidationError, PantscutError
from .mesh import TriMesh

RNG_ALGORITHM = "PCG64"  # numpy default_rng; recorded in tool metadata


def make_rng(seed):
    return np.random.default_rng(seed)


# ----------------------------------------------------------------------
# primitive grids


def grid_torus(res, major=1.0, minor=0.45, center=(0.0, 0.0, 0.0)):
    """Torus as a res x res vertex grid, consistently oriented."""
    if res < 8:
        raise ValueError("torus grid needs res >= 8")
    n = res
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    u = 2.0 * np.pi * i / n
    v = 2.0 * np.pi * j / n
    cx, cy, cz = center
    x = cx + (major + minor * np.cos(v)) * np.cos(u)
    y = cy + (major + minor * np.cos(v)) * np.sin(u)
    z = cz + minor * np.sin(v)
    verts = np.stack([x.ravel(), y.ravel(), z.ravel()], axis=1)

    def vid(a, b):
        return (a % n) * n + (b % n)

    tris = []
    for a in range(n):
        for b in range(n):
            p, q = vid(a, b), vid(a + 1, b)
            r, s = vid(a + 1, b + 1), vid(a, b + 1)
            tris.append((p, q, r))
            tris.append((p, r, s))
    return verts, np.asarray(tris, dtype=np.int64)


def uv_sphere(res, radius=1.0, center=(0.0, 0.0, 0.0)):
    """Longitude/latitude sphere with pole fans."""
    if res < 6:
        raise ValueError("sphere needs res >= 6")
    n = res
    verts = [np.array([0.0, 0.0, radius]), np.array([0.0, 0.0, -radius])]
    rows = []
    for i in range(1, n):
        theta = np.pi * i / n
        row = []
        for j in range(n):
            phi = 2.0 * np.pi * j / n
            row.append(len(verts))
            verts.append(
                np.array(
                    [
                        radius * np.sin(theta) * np.cos(phi),
                        radius * np.sin(theta) * np.sin(phi),
                        radius * np.cos(theta),
                    ]
                )
            )
        rows.append(row)
    tris = []
    top = rows[0]
    for j in range(n):
        tris.append((0, top[j], top[(j + 1) % n]))
    for i in range(len(rows) - 1):
        a, b = rows[i], rows[i + 1]
        for j in range(n):
            j2 = (j + 1) % n
            tris.append((a[j], b[j], b[j2]))
            tris.append((a[j], b[j2], a[j2]))
    bot = rows[-1]
    for j in range(n):
        tris.append((1, bot[(j + 1) % n], bot[j]))
    verts = np.asarray(verts) + np.asarray(center)
    return verts, np.asarray(tris, dtype=np.int64)


def cylinder(n_rows, n_around, radius=1.0, height=1.0):
    """Open tube with two boundary circles."""
    verts = []
    rows = []
    for i in range(n_rows + 1):
        row = []
        z = height * i / n_rows
        for j in range(n_around):
            phi = 2.0 * np.pi * j / n_around
            row.append(len(verts))
            verts.append((radius * np.cos(phi), radius * np.sin(phi), z))
        rows.append(row)
    tris = []
    for i in range(n_rows):
        a, b = rows[i], rows[i + 1]
        for j in range(n_around):
            j2 = (j + 1) % n_around
            tris.append((a[j], b[j], b[j2]))
            tris.append((a[j], b[j2], a[j2]))
    return TriMesh(np.asarray(verts, dtype=np.float64), np.asarray(tris, dtype=np.int64))


# ----------------------------------------------------------------------
# surgery helpers


def _remove_star(tris, v):
    keep = ~(tris == v).any(axis=1)
    return tris[keep]


def _directed_set(tris):
    s = set()
    for a, b, c in tris:
        s.add((int(a), int(b)))
        s.add((int(b), int(c)))
        s.add((int(c), int(a)))
    return s


def _stitch_loops(tris, loop_a, loop_b, positions):
    """Bridge two equal-length boundary loops with a triangle strip.

    The strip's winding is chosen so every directed halfedge it adds is
    currently missing (i.e. the loops really are boundaries and the
    result stays consistently oriented).
    """
    la, lb = list(map(int, loop_a)), list(map(int, loop_b))
    if len(la) != len(lb):
        raise PantscutError("cannot stitch loops of different lengths")
    have = _directed_set(tris)

    def walk_dir(loop):
        fwd = all((loop[k - 1], loop[k]) not in have for k in range(len(loop)))
        rev = all((loop[k], loop[k - 1]) not in have for k in range(len(loop)))
        if fwd == rev:
            raise PantscutError("loop is not a coherent boundary cycle")
        return loop if fwd else loop[::-1]

    w = walk_dir(la)
    x = walk_dir(lb)
    n = len(w)
    # align the reversed top loop to start near w[0], minimising twist
    pw = positions[w[0]]
    m = min(range(n), key=lambda k: float(np.linalg.norm(positions[x[k]] - pw)))
    y = [x[(m - k) % n] for k in range(n)]
    strip = []
    for k in range(n):
        k2 = (k + 1) % n
        strip.append((w[k], w[k2], y[k2]))
        strip.append((w[k], y[k2], y[k]))
    return np.concatenate([tris, np.asarray(strip, dtype=np.int64)])


def _compact(verts, tris):
    used = np.unique(tris)
    remap = np.full(len(verts), -1, dtype=np.int64)
    remap[used] = np.arange(len(used))
    return verts[used], remap[tris]


def orient_consistently(tris):
    """Flip triangles so shared edges are traversed in opposite directions."""
    tris = np.array(tris, dtype=np.int64)
    edge_faces = {}
    for f, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            key = (int(min(u, v)), int(max(u, v)))
            edge_faces.setdefault(key, []).append(f)
    flip = np.full(len(tris), -1, dtype=np.int8)

    def has_directed(f, u, v):
        a, b, c = tris[f]
        return (a, b) == (u, v) or (b, c) == (u, v) or (c, a) == (u, v)

    for start in range(len(tris)):
        if flip[start] >= 0:
            continue
        flip[start] = 0
        stack = [start]
        while stack:
            f = stack.pop()
            a, b, c = (int(x) for x in tris[f])
            for u, v in ((a, b), (b, c), (c, a)):
                key = (min(u, v), max(u, v))
                for f2 in edge_faces[key]:
                    if f2 == f:
                        continue
                    same = has_directed(f2, u, v) == has_directed(f, u, v)
                    want = (flip[f] + (1 if same else 0)) % 2
                    if flip[f2] < 0:
                        flip[f2] = want
                        stack.append(f2)
                    elif flip[f2] != want:
                        raise MeshValidationError("surface is non-orientable")
    out = tris.copy()
    sel = flip == 1
    out[sel] = out[sel][:, [0, 2, 1]]
    return out


# ----------------------------------------------------------------------
# the main generator


def synth_genus_g(genus, res=24, boundaries=0):
    """Closed (or punctured) surface of the requested type.

    Parameters
    ----------
    genus : int >= 0
    res : int
        Grid resolution of each torus / the sphere.
    boundaries : int >= 0
        Number of boundary loops to punch.

    Returns
    -------
    TriMesh
    """
    if genus < 0 or boundaries < 0:
        raise ValueError("genus and boundaries must be non-negative")
    glue_pairs = []
    if genus == 0:
        verts, tris = uv_sphere(res)
        holes = []
        n = res
        row = max(2, (n - 1) // 2)
        for j in range(boundaries):
            col = (j * (n // max(1, boundaries))) % n
            holes.append(2 + (row - 1) * n + col)
    else:
        spacing = 3.2
        parts = []
        for i in range(genus):
            parts.append(grid_torus(res, center=(i * spacing, 0.0, 0.0)))
        offs = np.cumsum([0] + [len(v) for v, _ in parts])[:-1]
        verts = np.concatenate([v for v, _ in parts])
        tris = np.concatenate([t + o for (_, t), o in zip(parts, offs)])
        n = res

        def gv(torus, a, b):
            return int(offs[torus] + (a % n) * n + (b % n))

        for i in range(genus - 1):
            glue_pairs.append((gv(i, 0, 0), gv(i + 1, n // 2, 0)))
        holes = []
        for j in range(boundaries):
            torus = j % genus
            row = n // 4 + 3 * (j // genus)
            holes.append(gv(torus, row, n // 4))
    centers = [c for pair in glue_pairs for c in pair] + holes
    if len(set(centers)) != len(centers):
        raise PantscutError("hole placements collide; raise res")
    probe = TriMesh(verts, tris)
    rings = {c: [int(x) for x in probe.vertex_ring(c)] for c in centers}
    closures = {c: set(ring) | {c} for c, ring in rings.items()}
    for ci in centers:
        if len(rings[ci]) != len(set(rings[ci])):
            raise PantscutError("hole star is not simple; raise res")
        for cj in centers:
            if ci < cj and closures[ci] & closures[cj]:
                raise PantscutError("hole stars overlap; raise res")
    for c in centers:
        tris = _remove_star(tris, c)
    if genus:
        for ca, cb in glue_pairs:
            tris = _stitch_loops(tris, rings[ca], rings[cb], verts)
    verts, tris = _compact(verts, tris)
    return TriMesh(verts, tris)


def noise_displace(mesh, amplitude, rng):
    """Displace every vertex by a random vector of length <= amplitude * bbox diagonal."""
    if amplitude < 0:
        raise ValueError("amplitude must be non-negative")
    scale = amplitude * mesh.bbox_diagonal()
    dirs = rng.normal(size=(mesh.n_vertices, 3))
    norms = np.linalg.norm(dirs, axis=1, keepdims=True)
    norms[norms == 0] = 1.0
    radii = scale * rng.uniform(size=(mesh.n_vertices, 1)) ** (1.0 / 3.0)
    return TriMesh(mesh.vertices + dirs / norms * radii, mesh.triangles)


# ----------------------------------------------------------------------
# degenerate fixture: tube around the theta graph


def theta_surface(tube_len=4):
    """Genus-2 surface with an explicit field having two monkey saddles.

    Two junction vertices each see a one-ring whose field values
    alternate six times (multiplicity-2 saddles); together with the
    single min and max this satisfies 1 - (2+2) + 1 = -2 = chi.

    Returns
    -------
    (TriMesh, ndarray)
        The surface and the layered field values.
    """
    if tube_len < 1:
        raise ValueError("tube_len must be >= 1")
    L = tube_len
    verts = []
    values = []

    def add(pos, val):
        verts.append(np.asarray(pos, dtype=np.float64))
        values.append(float(val))
        return len(verts) - 1

    v_min = add((0, 0, -3.0), 0.0)
    bbot = [
        add((np.cos(2 * np.pi * k / 6), np.sin(2 * np.pi * k / 6), -2.0), 1.0)
        for k in range(6)
    ]
    star_bot = add((0, 0, -1.6), 2.0)

    # three tubes, each a stack of 3-vertex rings
    tube_centers = [
        np.array([1.2 * np.cos(2 * np.pi * k / 3 + np.pi / 6),
                  1.2 * np.sin(2 * np.pi * k / 3 + np.pi / 6)])
        for k in range(3)
    ]
    height = 2.0
    rings = []  # rings[k][r] = [3 vertex ids], r = 0..L
    for k in range(3):
        col = []
        for r in range(L + 1):
            z = -1.0 + height * r / L
            ring = []
            for s in range(3):
                ang = 2 * np.pi * s / 3 + 0.4 * k
                ring.append(
                    add(
                        (
                            tube_centers[k][0] + 0.3 * np.cos(ang),
                            tube_centers[k][1] + 0.3 * np.sin(ang),
                            z,
                        ),
                        3.0 + r,
                    )
                )
            col.append(ring)
        rings.append(col)

    star_top = add((0, 0, 1.6), 4.0 + L)
    btop = [
        add((np.cos(2 * np.pi * k / 6), np.sin(2 * np.pi * k / 6), 2.0), 5.0 + L)
        for k in range(6)
    ]
    v_max = add((0, 0, 3.0), 6.0 + L)

    tris = []

    def fan(apex, circle):
        for k in range(len(circle)):
            tris.append((apex, circle[k], circle[(k + 1) % len(circle)]))

    def junction(star, bc, circles):
        """Monkey-saddle junction between a 6-circle and three 3-circles.

        ``bc`` is the 6-vertex circle, ``circles[k] = (c, d, e)`` the
        three tube rings.  The star vertex's one-ring alternates
        bc[0], c0, bc[2], c1, bc[4], c2.
        """
        c = [circ[0] for circ in circles]
        d = [circ[1] for circ in circles]
        e = [circ[2] for circ in circles]
        for k in range(3):
            tris.append((star, bc[2 * k], c[k]))
            tris.append((star, c[k], bc[(2 * k + 2) % 6]))
        for k in range(3):
            b0, b1, b2 = bc[2 * k], bc[2 * k + 1], bc[(2 * k + 2) % 6]
            tris.append((b0, d[k], c[k]))
            tris.append((b0, b1, d[k]))
            tris.append((b1, e[k], d[k]))
            tris.append((b1, b2, e[k]))
            tris.append((b2, c[k], e[k]))

    fan(v_min, bbot)
    junction(star_bot, bbot, [rings[k][0] for k in range(3)])
    for k in range(3):
        for r in range(L):
            a, b = rings[k][r], rings[k][r + 1]
            for s in range(3):
                s2 = (s + 1) % 3
                tris.append((a[s], a[s2], b[s2]))
                tris.append((a[s], b[s2], b[s]))
    junction(star_top, btop, [rings[k][L] for k in range(3)])
    fan(v_max, btop)

    tris = orient_consistently(np.asarray(tris, dtype=np.int64))
    mesh = TriMesh(np.asarray(verts), tris)
    return mesh, np.asarray(values, dtype=np.float64)
