"""Brute-force reference implementations used to check the library.

Everything here is written in the most naive way possible — plain
dicts and sets, no shared code with the package under test — so that
agreement between the two is meaningful.  Inputs are raw triangle
index lists; nothing depends on pantscut data structures.
"""


class _TinyUF:
    def __init__(self):
        self.parent = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra

    def n_roots(self):
        return len({self.find(x) for x in self.parent})


def edge_set(triangles):
    edges = set()
    for a, b, c in triangles:
        edges.add(frozenset((int(a), int(b))))
        edges.add(frozenset((int(b), int(c))))
        edges.add(frozenset((int(c), int(a))))
    return edges


def euler_characteristic(triangles):
    verts = {int(v) for tri in triangles for v in tri}
    return len(verts) - len(edge_set(triangles)) + len(triangles)


def boundary_loops(triangles):
    """Boundary cycles of a consistently oriented manifold mesh.

    A directed edge is on the boundary when its reverse never occurs.
    Each boundary vertex then has a unique outgoing boundary edge, so
    the cycles can be walked directly.
    """
    directed = set()
    for a, b, c in triangles:
        a, b, c = int(a), int(b), int(c)
        directed.update([(a, b), (b, c), (c, a)])
    succ = {}
    for u, v in directed:
        if (v, u) not in directed:
            if u in succ:
                raise ValueError(f"vertex {u} on two boundary edges out")
            succ[u] = v
    loops = []
    seen = set()
    for start in sorted(succ):
        if start in seen:
            continue
        loop = [start]
        seen.add(start)
        v = succ[start]
        while v != start:
            loop.append(v)
            seen.add(v)
            v = succ[v]
        loops.append(loop)
    return loops


def classify_surface(triangles):
    """(genus, boundary count) from first principles."""
    chi = euler_characteristic(triangles)
    b = len(boundary_loops(triangles))
    g2 = 2 - b - chi
    if g2 < 0 or g2 % 2:
        raise ValueError(f"impossible surface: chi={chi} b={b}")
    return g2 // 2, b


def connected_components(triangles):
    uf = _TinyUF()
    for tri in triangles:
        a, b, c = (int(x) for x in tri)
        for v in (a, b, c):
            uf.add(v)
        uf.union(a, b)
        uf.union(a, c)
    return uf.n_roots()


def level_loop_count(triangles, below):
    """Number of closed level-set loops at a cut.

    ``below`` maps each vertex id to a bool.  A crossing edge has one
    endpoint below and one above; two crossing edges are on the same
    loop when a triangle contains both.  Returns the component count
    of that relation.  Also checks each triangle has 0 or 2 crossing
    edges, which is what makes the loops simple and closed.
    """
    uf = _TinyUF()
    for tri in triangles:
        a, b, c = (int(x) for x in tri)
        crossing = []
        for u, v in ((a, b), (b, c), (c, a)):
            if below[u] != below[v]:
                crossing.append(frozenset((u, v)))
        if len(crossing) not in (0, 2):
            raise ValueError(f"triangle {tri} has {len(crossing)} crossings")
        for e in crossing:
            uf.add(e)
        if len(crossing) == 2:
            uf.union(crossing[0], crossing[1])
    return uf.n_roots()


def one_ring_cycle(triangles, v):
    """Ordered neighbours of interior vertex v, walked around the fan."""
    succ = {}
    for tri in triangles:
        a, b, c = (int(x) for x in tri)
        if v == a:
            succ[b] = c
        elif v == b:
            succ[c] = a
        elif v == c:
            succ[a] = b
    start = min(succ)
    ring = [start]
    u = succ[start]
    while u != start:
        ring.append(u)
        if u not in succ:
            raise ValueError(f"vertex {v} is not interior")
        u = succ[u]
    if len(ring) != len(succ):
        raise ValueError(f"vertex {v} has a non-disc neighbourhood")
    return ring


def ring_classify(triangles, key, v):
    """Classify an interior vertex from scratch.

    ``key(u)`` must give a total order (e.g. ``(value[u], u)``).
    Returns "min", "max", "regular" or ("saddle", multiplicity).
    """
    ring = one_ring_cycle(triangles, v)
    signs = [1 if key(u) > key(v) else -1 for u in ring]
    alt = sum(
        1
        for i in range(len(signs))
        if signs[i] != signs[(i + 1) % len(signs)]
    )
    if alt == 0:
        return "min" if signs[0] > 0 else "max"
    if alt == 2:
        return "regular"
    assert alt % 2 == 0
    return ("saddle", (alt - 2) // 2)
