"""PL Morse theory on the symbolic vertex order.

Interior vertices are classified by the number of sign alternations of
f around their one-ring: 0 alternations is an extremum, 2 a regular
vertex, 2+2m a saddle of multiplicity m.  Boundary vertices are never
classified.  Because comparisons use (value, index), ties cannot occur
and every field is PL Morse; the identity

    n_min - sum(multiplicities) + n_max = chi

holds on closed meshes and is asserted after every classification.

Level sets live *between* two consecutive order ranks, so a level is a
rank threshold plus a representative real value; extraction walks the
crossing edges through triangles into closed loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DecompositionError, FieldError, PantscutError
from .cutting import CutCurve

T_EPS = 1e-9  # keeps interpolated points strictly inside their edge


@dataclass(frozen=True)
class CriticalVertex:
    vertex: int
    kind: str  # "min" | "saddle" | "max"
    multiplicity: int  # >= 1 for saddles (>= 2 means degenerate), 0 otherwise
    value: float
    rank: int

    @property
    def is_degenerate(self):
        return self.kind == "saddle" and self.multiplicity >= 2


@dataclass
class CriticalReport:
    criticals: list  # CriticalVertex, ascending by rank
    n_min: int
    n_max: int
    saddle_multiplicity_total: int

    @property
    def saddles(self):
        return [c for c in self.criticals if c.kind == "saddle"]

    @property
    def minima(self):
        return [c for c in self.criticals if c.kind == "min"]

    @property
    def maxima(self):
        return [c for c in self.criticals if c.kind == "max"]

    @property
    def has_degenerate(self):
        return any(c.is_degenerate for c in self.criticals)


def classify_vertices(field):
    """Classify every interior vertex; boundary vertices are exempt."""
    m = field.mesh
    rank = field.rank
    alt, low = _kernels.count_ring_alternations(
        m.ring_indptr,
        m.ring_verts,
        m.ring_closed,
        rank,
        np.arange(m.n_vertices, dtype=np.int64),
    )
    crits = []
    deg = np.diff(m.ring_indptr)
    for v in np.nonzero(m.ring_closed == 1)[0]:
        a = int(alt[v])
        if a == 2:
            continue
        if a == 0:
            kind = "min" if low[v] == 0 else "max"
            if 0 < low[v] < deg[v]:
                raise PantscutError(f"vertex {v}: zero alternations but mixed ring")
            crits.append(
                CriticalVertex(int(v), kind, 0, float(field.values[v]), int(rank[v]))
            )
        else:
            if a % 2 or a < 4:
                raise PantscutError(f"vertex {v}: impossible alternation count {a}")
            crits.append(
                CriticalVertex(
                    int(v), "saddle", (a - 2) // 2, float(field.values[v]), int(rank[v])
                )
            )
    crits.sort(key=lambda c: c.rank)
    report = CriticalReport(
        crits,
        sum(1 for c in crits if c.kind == "min"),
        sum(1 for c in crits if c.kind == "max"),
        sum(c.multiplicity for c in crits if c.kind == "saddle"),
    )
    if m.is_closed():
        chi = m.euler_characteristic()
        if report.n_min - report.saddle_multiplicity_total + report.n_max != chi:
            raise PantscutError(
                "PL Morse identity violated: "
                f"{report.n_min} - {report.saddle_multiplicity_total} + "
                f"{report.n_max} != chi={chi}"
            )
    return report


def classify_vertex(field, v):
    """Classification of a single interior vertex: (kind, multiplicity)."""
    m = field.mesh
    if not m.ring_closed[v]:
        raise FieldError(f"vertex {v} lies on the boundary and is not classified")
    ring = m.vertex_ring(v)
    rank = field.rank
    below = rank[ring] < rank[v]
    alt = int((below != np.roll(below, 1)).sum())
    if alt == 0:
        return ("min", 0) if not below.any() else ("max", 0)
    if alt == 2:
        return ("regular", 0)
    return ("saddle", (alt - 2) // 2)


# ----------------------------------------------------------------------
# levels and level sets


@dataclass(frozen=True)
class CutLevel:
    """A regular level: everything with rank <= threshold lies below."""

    threshold: int
    value: float


def level_from_value(field, c):
    """The cut position of a real value ``c`` (must miss all vertex values)."""
    sv = field.values[field.order]
    if (sv == c).any():
        raise FieldError(f"level {c} hits a vertex value; pick a regular value")
    k = int(np.searchsorted(sv, c, side="left")) - 1
    if k < 0 or k >= len(sv) - 1:
        raise FieldError(f"level {c} lies outside the open range of the field")
    return CutLevel(k, float(c))


def midpoint_level(field, lo_rank, hi_rank):
    """Symbolic midpoint between two order positions."""
    k = (lo_rank + hi_rank) // 2
    sv = field.values[field.order]
    return CutLevel(int(k), float(0.5 * (sv[k] + sv[k + 1])))


def gap_levels(field, criticals, gap_indices):
    """One regular level per requested gap between consecutive criticals.

    Uses the value midpoint (t_i + t_{i+1}) / 2 when it separates the two
    criticals, falling back to the symbolic midpoint when their values
    are adjacent in the global order (ties, plateaus).
    """
    sv = field.values[field.order]
    out = []
    for i in gap_indices:
        p, q = criticals[i], criticals[i + 1]
        c = 0.5 * (p.value + q.value)
        k = int(np.searchsorted(sv, c, side="left")) - 1
        if p.rank <= k < q.rank and not (sv == c).any():
            out.append(CutLevel(k, float(c)))
        else:
            out.append(midpoint_level(field, p.rank, q.rank))
    return out


def regular_midvalues(field, report, window=None):
    """Representative regular values between consecutive criticals.

    ``window = (a, b)`` restricts to criticals a..b (0-based, inclusive);
    the default spans the whole report.
    """
    crits = report.criticals
    if window is None:
        window = (0, len(crits) - 1)
    a, b = window
    return [lvl.value for lvl in gap_levels(field, crits, range(a, b))]


def _edge_point(field, a, b, level):
    """(u, v, t) for a crossing edge: u below, v above, t measured from u."""
    rank = field.rank
    u, v = (a, b) if rank[a] <= level.threshold else (b, a)
    fu, fv = field.values[u], field.values[v]
    if fu == fv:
        t = 0.5
    else:
        t = float(np.clip((level.value - fu) / (fv - fu), T_EPS, 1.0 - T_EPS))
    return (int(u), int(v), t)


def _chain_crossing_loops(field, level, edge_ids):
    """Chain a set of crossing edges into closed loops through triangles."""
    m = field.mesh
    tri_edges = m.tri_edges
    edge_tris = m.edge_tris
    edges = m.edges
    crossing = np.zeros(m.n_edges, dtype=bool)
    crossing[edge_ids] = True
    visited = np.zeros(m.n_edges, dtype=bool)
    loops = []
    for e0 in edge_ids:
        if visited[e0]:
            continue
        loop_edges = [int(e0)]
        visited[e0] = True
        t = edge_tris[e0, 0]
        e = int(e0)
        while True:
            if t < 0:
                raise FieldError(
                    "level set reaches the mesh boundary (field not constant "
                    "on a boundary component?)"
                )
            nxt = -1
            for cand in tri_edges[t]:
                if cand != e and crossing[cand]:
                    if nxt >= 0:
                        raise PantscutError(
                            f"triangle {t} crossed by more than two edges at one level"
                        )
                    nxt = int(cand)
            if nxt < 0:
                raise PantscutError(f"triangle {t} has a dangling crossing edge")
            if nxt == e0:
                break
            visited[nxt] = True
            loop_edges.append(nxt)
            t = edge_tris[nxt, 0] if edge_tris[nxt, 1] == t else edge_tris[nxt, 1]
            e = nxt
        pts = [_edge_point(field, int(edges[e][0]), int(edges[e][1]), level)
               for e in loop_edges]
        loops.append(
            CutCurve(kind="iso", level=level.value, threshold=level.threshold,
                     points=pts)
        )
    return loops


def extract_level_set(field, level):
    """All loops of the level set at a regular level.

    ``level`` may be a :class:`CutLevel` or a real value not hitting any
    vertex.  Returns a list of iso :class:`CutCurve` loops (empty below
    the global minimum sliver or above the maximum).
    """
    if not isinstance(level, CutLevel):
        c = float(level)
        sv = field.values[field.order]
        if c < sv[0] or c > sv[-1]:
            return []
        level = level_from_value(field, c)
    m = field.mesh
    rank = field.rank
    e = m.edges
    below = rank <= level.threshold
    mask = below[e[:, 0]] != below[e[:, 1]]
    edge_ids = np.nonzero(mask)[0]
    return _chain_crossing_loops(field, level, edge_ids)


# ----------------------------------------------------------------------
# descending paths and saddle loops


def descending_path(field, start, ascending=False):
    """Steepest monotone path from ``start`` to a local extremum.

    Steps to the neighbour with the largest value drop (rise), ties by
    smallest vertex index --- equivalently the extreme neighbour in the
    symbolic order.  The start vertex is included.
    """
    m = field.mesh
    rank = field.rank
    path = [int(start)]
    cur = int(start)
    for _ in range(m.n_vertices + 1):
        ring = m.vertex_ring(cur)
        r = rank[ring]
        if ascending:
            best = ring[np.argmax(r)]
            if rank[best] <= rank[cur]:
                return np.asarray(path, dtype=np.int64)
        else:
            best = ring[np.argmin(r)]
            if rank[best] >= rank[cur]:
                return np.asarray(path, dtype=np.int64)
        cur = int(best)
        path.append(cur)
    raise PantscutError("monotone path failed to terminate")


def link_components(field, v, side="lower"):
    """Maximal arcs of the one-ring strictly below (above) the vertex."""
    m = field.mesh
    ring = m.vertex_ring(v)
    if not m.ring_closed[v]:
        raise FieldError(f"vertex {v} lies on the boundary")
    rank = field.rank
    sel = rank[ring] < rank[v] if side == "lower" else rank[ring] > rank[v]
    n = len(ring)
    if not sel.any():
        return []
    if sel.all():
        return [list(map(int, ring))]
    # rotate so the ring starts just after a non-selected position
    start = int(np.nonzero(~sel)[0][0]) + 1
    comps = []
    cur = []
    for k in range(n):
        i = (start + k) % n
        if sel[i]:
            cur.append(int(ring[i]))
        elif cur:
            comps.append(cur)
            cur = []
    if cur:
        comps.append(cur)
    return comps


def _candidate_pairs(n_a, n_b, attempt):
    """Deterministic enumeration of start-vertex pairs for retries."""
    pairs = []
    for s in range(n_a + n_b - 1):
        for i in range(min(s, n_a - 1) + 1):
            j = s - i
            if j < n_b:
                pairs.append((i, j))
    if attempt >= len(pairs):
        raise DecompositionError("exhausted saddle-loop start candidates")
    return pairs[attempt]


def saddle_loop(field, saddle, direction="down", attempt=0):
    """Simple closed vertex loop through a simple saddle and an extremum.

    Walks two monotone paths from the lowest vertices of the saddle's
    two lower-link arcs (upper for direction="up"), closing the loop at
    the earliest vertex the paths share and trimming the merged tails.
    ``attempt`` perturbs the start-vertex choice for retries.
    """
    m = field.mesh
    rank = field.rank
    side = "lower" if direction == "down" else "upper"
    comps = link_components(field, saddle, side)
    if len(comps) != 2:
        raise DecompositionError(
            f"vertex {saddle} has {len(comps)} {side}-link arcs; "
            "loops are traced only through simple saddles"
        )
    key = (lambda v: rank[v]) if direction == "down" else (lambda v: -rank[v])
    cand_a = sorted(comps[0], key=key)
    cand_b = sorted(comps[1], key=key)
    if key(cand_b[0]) < key(cand_a[0]):
        cand_a, cand_b = cand_b, cand_a
    ia, ib = _candidate_pairs(len(cand_a), len(cand_b), attempt)
    va, vb = cand_a[ia], cand_b[ib]
    asc = direction == "up"
    path_a = descending_path(field, va, ascending=asc)
    path_b = descending_path(field, vb, ascending=asc)
    pos_b = {int(v): i for i, v in enumerate(path_b)}
    merge_a = merge_b = -1
    for i, v in enumerate(path_a):
        if int(v) in pos_b:
            merge_a, merge_b = i, pos_b[int(v)]
            break
    if merge_a < 0:
        raise DecompositionError(
            f"paths from saddle {saddle} end at different extrema"
        )
    loop = [int(saddle)]
    loop.extend(int(v) for v in path_a[: merge_a + 1])
    loop.extend(int(v) for v in path_b[:merge_b][::-1])
    if len(loop) < 3 or len(set(loop)) != len(loop):
        raise DecompositionError(f"loop through saddle {saddle} is not simple")
    idx = m.edge_index
    for i in range(len(loop)):
        a, b = loop[i], loop[(i + 1) % len(loop)]
        if (min(a, b), max(a, b)) not in idx:
            raise PantscutError(f"loop step ({a},{b}) is not a mesh edge")
    return np.asarray(loop, dtype=np.int64)
