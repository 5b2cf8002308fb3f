"""Reeb graph construction by an ascending sweep over the vertex order.

Level-set components are tracked as connected sets of *crossing edges*
(edges with exactly one endpoint below the sweep front).  Between
events the tracking is merge-only union-find, which is exact because
level topology changes only at critical vertices; at events the
components are rebuilt from scratch and matched to the arcs entering
the event through their surviving member edges.

Boundary components are contracted to virtual sweep vertices, one per
component, so each boundary circle becomes a degree-1 graph node.  The
per-edge arc membership history is logged during the sweep; it is what
lets a cut point on a graph arc be turned back into a single level-set
circle on the mesh, even when the level contains other circles.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field as dataclass_field

import numpy as np

from . import _kernels
from .cutting import CutCurve
from .errors import DecompositionError, FieldError, PantscutError
from .morse import CutLevel, _chain_crossing_loops, classify_vertices


@dataclass
class ReebNode:
    id: int
    kind: str  # "min" | "saddle" | "max" | "boundary"
    value: float
    pos: int                # sweep position
    vertex: int = -1        # mesh vertex for interior nodes
    boundary_comp: int = -1
    multiplicity: int = 0
    orig_rank: int = -1


@dataclass
class ReebArc:
    id: int
    lower: int              # node id
    upper: int
    lo_pos: int
    hi_pos: int
    # (lo_pos, hi_pos, base_arc_id) pieces; >1 entry after smoothing
    spans: list = dataclass_field(default_factory=list)


class ReebGraph:
    """Nodes at critical events, arcs carrying level-set circles."""

    def __init__(self, nodes, arcs, field, edge_log, pos_of_vertex,
                 sweep_orig_rank):
        self.nodes = nodes  # dict id -> ReebNode
        self.arcs = arcs    # dict id -> ReebArc
        self.field = field
        self.edge_log = edge_log            # per mesh edge: [(pos, base_arc)]
        self.pos_of_vertex = pos_of_vertex  # interior vertex -> sweep position
        self.sweep_orig_rank = sweep_orig_rank

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_arcs(self):
        return len(self.arcs)

    def node_arcs(self, nid):
        return [a for a in self.arcs.values() if a.lower == nid or a.upper == nid]

    def degree(self, nid):
        d = 0
        for a in self.arcs.values():
            d += (a.lower == nid) + (a.upper == nid)
        return d

    def loop_rank(self):
        """First Betti number of the graph: arcs - nodes + components."""
        ids = sorted(self.nodes)
        index = {n: i for i, n in enumerate(ids)}
        uf = _kernels.UnionFind(len(ids))
        for a in self.arcs.values():
            uf.union(index[a.lower], index[a.upper])
        comps = len({uf.find(i) for i in range(len(ids))})
        return self.n_arcs - self.n_nodes + comps

    def _clone(self, nodes, arcs):
        return ReebGraph(nodes, arcs, self.field, self.edge_log,
                         self.pos_of_vertex, self.sweep_orig_rank)


def compute_reeb(field, report=None):
    """Sweep the mesh upward and assemble the Reeb graph of the field."""
    m = field.mesh
    V = m.n_vertices
    rank = field.rank
    if report is None:
        report = classify_vertices(field)
    crit = {c.vertex: c for c in report.criticals}

    # contract each boundary component to one virtual sweep vertex
    b_loops = m.boundary_components()
    n_b = len(b_loops)
    svert_of = np.arange(V, dtype=np.int64)
    b_values = np.empty(n_b)
    for j, loop in enumerate(b_loops):
        vals = field.values[loop]
        if vals.min() != vals.max():
            raise FieldError(f"field is not constant on boundary component {j}")
        svert_of[loop] = V + j
        b_values[j] = vals[0]
    n_s = V + n_b

    interior = np.nonzero(~m.vertex_on_boundary)[0]
    all_vals = np.concatenate([field.values[interior], b_values])
    all_ids = np.concatenate([interior, V + np.arange(n_b, dtype=np.int64)])
    o = np.lexsort((all_ids, all_vals))
    sweep = all_ids[o]
    n_sweep = len(sweep)
    pos_of_svert = np.full(n_s, -1, dtype=np.int64)
    pos_of_svert[sweep] = np.arange(n_sweep)
    sweep_orig_rank = np.where(sweep < V, rank[np.clip(sweep, 0, V - 1)], -1)

    # incidence of svertices with (non-contracted) edges and with triangles
    esv = svert_of[m.edges]
    kept = esv[:, 0] != esv[:, 1]
    kept_ids = np.nonzero(kept)[0]
    ie_ids = np.concatenate([kept_ids, kept_ids])
    ie_svs = np.concatenate([esv[kept, 0], esv[kept, 1]])
    eo = np.argsort(ie_svs, kind="stable")
    inc_e_data = ie_ids[eo]
    inc_e_ptr = np.searchsorted(ie_svs[eo], np.arange(n_s + 1))
    nF = m.n_triangles
    pairs = np.unique(svert_of[m.triangles].ravel() * np.int64(nF)
                      + np.repeat(np.arange(nF, dtype=np.int64), 3))
    inc_t_data = pairs % nF
    inc_t_ptr = np.searchsorted(pairs // nF, np.arange(n_s + 1))

    tri_edges = np.ascontiguousarray(m.tri_edges)
    nE = m.n_edges
    active = np.zeros(nE, dtype=np.uint8)
    parent = np.full(nE, -1, dtype=np.int64)
    edge_arc = np.full(nE, -1, dtype=np.int64)
    edge_log = [[] for _ in range(nE)]
    arc_of_root = {}
    nodes = {}
    arcs = {}

    def find(e):
        while parent[e] != e:
            parent[e] = parent[parent[e]]
            e = parent[e]
        return e

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    def open_arc(nid, p):
        aid = len(arcs)
        arcs[aid] = ReebArc(aid, nid, -1, p, -1, [[p, -1, aid]])
        return aid

    def close_arc(aid, nid, p):
        a = arcs[aid]
        a.upper = nid
        a.hi_pos = p
        a.spans[-1][1] = p

    for p in range(n_sweep):
        s = int(sweep[p])
        inc = inc_e_data[inc_e_ptr[s]:inc_e_ptr[s + 1]]
        lower = [int(e) for e in inc if active[e]]
        upper = [int(e) for e in inc if not active[e]]
        is_event = s >= V or s in crit

        if not is_event:
            roots = {find(e) for e in lower}
            if len(roots) != 1:
                raise PantscutError(
                    f"regular vertex {s} touches {len(roots)} level components"
                )
            aid = arc_of_root[roots.pop()]
            for e in lower:
                active[e] = 0
            for e in upper:
                active[e] = 1
                parent[e] = e
            for f in inc_t_data[inc_t_ptr[s]:inc_t_ptr[s + 1]]:
                e0, e1, e2 = tri_edges[f]
                if active[e0] and active[e1]:
                    union(e0, e1)
                if active[e0] and active[e2]:
                    union(e0, e2)
                if active[e1] and active[e2]:
                    union(e1, e2)
            r = find(upper[0]) if upper else None
            if r is None:
                raise PantscutError(f"regular vertex {s} has no upper edges")
            arc_of_root[r] = aid
            for e in upper:
                edge_arc[e] = aid
                edge_log[e].append((p, aid))
            continue

        # --- event vertex: close/open arcs around a fresh component rebuild
        pre_arcs = {arc_of_root[r] for r in {find(e) for e in lower}}
        for e in lower:
            active[e] = 0
        for e in upper:
            active[e] = 1
        act_ids = np.nonzero(active)[0]
        parent[act_ids] = act_ids
        _kernels.union_active_triangle_edges(tri_edges, active, parent)

        comp = {}  # root -> [has_upper, set of entering arcs]
        upper_set = set(upper)
        for e in map(int, act_ids):
            r = find(e)
            info = comp.get(r)
            if info is None:
                info = comp[r] = [False, set()]
            if e in upper_set:
                info[0] = True
            else:
                info[1].add(int(edge_arc[e]))

        nid = len(nodes)
        if s >= V:
            node = ReebNode(nid, "boundary", float(b_values[s - V]), p,
                            boundary_comp=s - V)
        else:
            c = crit[s]
            node = ReebNode(nid, c.kind, c.value, p, vertex=s,
                            multiplicity=c.multiplicity, orig_rank=c.rank)
        nodes[nid] = node

        arc_of_root = {}
        n_new = 0
        for r in sorted(comp):
            has_upper, entering = comp[r]
            if has_upper:
                if not entering <= pre_arcs:
                    raise PantscutError(
                        f"event {s}: component joins arcs not incident to it"
                    )
                aid = open_arc(nid, p)
                n_new += 1
                arc_of_root[r] = aid
                for e in map(int, act_ids):
                    if find(e) == r and edge_arc[e] != aid:
                        edge_arc[e] = aid
                        edge_log[e].append((p, aid))
            else:
                if len(entering) != 1 or not entering.isdisjoint(pre_arcs):
                    raise PantscutError(
                        f"event {s}: level component changed away from the event"
                    )
                arc_of_root[r] = next(iter(entering))
        for aid in sorted(pre_arcs):
            close_arc(aid, nid, p)

        degree = len(pre_arcs) + n_new
        if node.kind in ("min", "max", "boundary") and degree != 1:
            raise PantscutError(
                f"{node.kind} node at {s} has degree {degree}, expected 1"
            )
        if node.kind == "saddle" and degree < 3:
            raise PantscutError(
                f"saddle node at {s} has degree {degree}, expected >= 3"
            )

    if active.any():
        raise PantscutError("sweep finished with active level-set edges")
    for a in arcs.values():
        if a.upper < 0:
            raise PantscutError(f"arc {a.id} never closed")

    return ReebGraph(nodes, arcs, field, edge_log, pos_of_svert[:V],
                     sweep_orig_rank)


def retract_leaves(graph):
    """Drop interior min/max leaf nodes with their arcs (boundary leaves stay).

    Removing an extremum leaf caps its disk off onto the neighbouring
    saddle; repeating this leaves only the essential branching structure
    plus one leg per boundary component.
    """
    nodes = dict(graph.nodes)
    arcs = dict(graph.arcs)
    while True:
        deg = {n: 0 for n in nodes}
        touch = {n: [] for n in nodes}
        for a in arcs.values():
            for end in (a.lower, a.upper):
                deg[end] += 1
                touch[end].append(a.id)
        n = next(
            (n for n in sorted(nodes)
             if deg[n] == 1 and nodes[n].kind in ("min", "max")),
            None,
        )
        if n is None:
            return graph._clone(nodes, arcs)
        del nodes[n]
        del arcs[touch[n][0]]


def smooth_degree2(graph):
    """Splice out degree-2 nodes, concatenating their two arcs.

    A pair of parallel arcs collapses into a self-loop; a self-loop at a
    degree-2 node (an isolated circle component) is left alone.
    """
    nodes = dict(graph.nodes)
    arcs = dict(graph.arcs)
    next_id = max(arcs) + 1 if arcs else 0
    skip = set()
    while True:
        target = None
        for n in sorted(nodes):
            if n in skip:
                continue
            touching = [a for a in arcs.values()
                        if a.lower == n or a.upper == n]
            if sum((a.lower == n) + (a.upper == n) for a in touching) != 2:
                continue
            if len(touching) == 1:  # self-loop: an isolated circle
                skip.add(n)
                continue
            target = (n, touching)
            break
        if target is None:
            return graph._clone(nodes, arcs)
        n, (a1, a2) = target
        # the spliced node need not be interior to the new arc: after
        # retraction both remaining arcs may leave n in the same sweep
        # direction (the node was a saddle whose extremum leg was pruned)
        ends = [a.upper if a.lower == n else a.lower for a in (a1, a2)]
        ends.sort(key=lambda e: (nodes[e].pos, e))
        merged = ReebArc(
            next_id,
            ends[0],
            ends[1],
            min(a1.lo_pos, a2.lo_pos),
            max(a1.hi_pos, a2.hi_pos),
            sorted(a1.spans + a2.spans),
        )
        next_id += 1
        del arcs[a1.id]
        del arcs[a2.id]
        del nodes[n]
        arcs[merged.id] = merged


@dataclass(frozen=True)
class ReebCutPoint:
    arc: int        # arc id in the (possibly smoothed) graph
    base_arc: int   # construction arc id owning the chosen level
    threshold: int  # rank threshold of the level to cut at


def select_cut_points(graph):
    """One cut per arc whose both endpoint nodes have degree >= 3.

    The cut sits at the median vertex rank between the arc's endpoint
    events; for a self-loop both endpoints coincide, and the median
    falls inside whichever constituent span covers it.
    """
    deg = {n: graph.degree(n) for n in graph.nodes}
    out = []
    for aid in sorted(graph.arcs):
        a = graph.arcs[aid]
        if deg[a.lower] < 3 or deg[a.upper] < 3:
            continue
        span_ranks = [
            (int(graph.sweep_orig_rank[lo]), int(graph.sweep_orig_rank[hi]))
            for lo, hi, _ in a.spans
        ]
        r_lo = min(r for r, _ in span_ranks)
        r_hi = max(r for _, r in span_ranks)
        if r_lo < 0 or r_hi < 0:
            raise PantscutError(f"arc {aid} endpoint is not an interior vertex")
        k = (r_lo + r_hi) // 2
        q = int(graph.pos_of_vertex[graph.field.order[k]])
        base = -1
        for lo_pos, hi_pos, base_id in a.spans:
            if lo_pos <= q < hi_pos:
                base = base_id
                break
        if base < 0:
            raise PantscutError(f"cut rank {k} falls outside arc {aid}")
        out.append(ReebCutPoint(aid, base, k))
    return out


def cut_point_to_curve(graph, cut):
    """Materialise a cut point as the one level-set circle on its arc."""
    field = graph.field
    k = cut.threshold
    sv = field.values[field.order]
    level = CutLevel(k, float(0.5 * (sv[k] + sv[k + 1])))
    q = int(graph.pos_of_vertex[field.order[k]])
    e = field.mesh.edges
    rank = field.rank
    below = rank <= k
    candidates = np.nonzero(below[e[:, 0]] != below[e[:, 1]])[0]
    keep = []
    for eid in map(int, candidates):
        log = graph.edge_log[eid]
        i = bisect.bisect_right(log, (q, np.inf)) - 1
        if i < 0:
            raise PantscutError(f"crossing edge {eid} has no sweep history")
        if log[i][1] == cut.base_arc:
            keep.append(eid)
    if not keep:
        raise DecompositionError(
            f"no level-set edges on arc {cut.base_arc} at rank {k}"
        )
    loops = _chain_crossing_loops(field, level, np.asarray(keep, dtype=np.int64))
    if len(loops) != 1:
        raise PantscutError(
            f"arc {cut.base_arc} carries {len(loops)} circles at rank {k}"
        )
    return loops[0]


def reeb_cut_curves(graph):
    """Cut points of the retracted + smoothed graph, as mesh curves."""
    simplified = smooth_degree2(retract_leaves(graph))
    return [cut_point_to_curve(graph, c) for c in select_cut_points(simplified)]
