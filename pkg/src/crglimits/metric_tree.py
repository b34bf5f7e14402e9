"""Rooted trees with edge lengths, marked points, gluing, quotient metrics.

Vertices are integers 0..n-1 and vertex 0 is the root.  Edges are oriented
away from the root: edge e = (u, v, length) has u strictly nearer the root.
A point is addressed as (edge id, offset from u); vertex identifications
turn a tree into a glued space whose distances are shortest paths in the
finite skeleton graph with identified vertices merged.
"""

from __future__ import annotations

import heapq
import math
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

__all__ = [
    "LocationError",
    "PointLocation",
    "MetricTree",
    "GluedSpace",
    "tree_distance",
    "rescale",
    "graft",
    "split_at",
    "glue",
    "glued_distance",
    "distance_matrix",
    "parse_text",
]

LENGTH_TOL = 1e-9


def _fmt(x: float) -> str:
    return "%.12g" % x


class LocationError(ValueError):
    """A point reference does not lie on the structure."""


class PointLocation(NamedTuple):
    edge: int
    offset: float


class MetricTree:
    """Finite rooted tree with positive edge lengths and named marks.

    Value-like: operations return new trees.  Mark offsets are measured
    from the nearer-to-root endpoint of their edge.
    """

    __slots__ = ("n_vertices", "edge_u", "edge_v", "edge_len", "marks",
                 "_parent", "_parent_edge", "_hops", "_depth")

    root = 0

    def __init__(self, n_vertices: int,
                 edge_u: Sequence[int], edge_v: Sequence[int],
                 edge_len: Sequence[float],
                 marks: Optional[Dict[str, PointLocation]] = None):
        self.n_vertices = int(n_vertices)
        self.edge_u = [int(x) for x in edge_u]
        self.edge_v = [int(x) for x in edge_v]
        self.edge_len = [float(x) for x in edge_len]
        self.marks: Dict[str, PointLocation] = {}
        self._index()
        if marks:
            for name, loc in marks.items():
                self.add_mark(name, loc)

    def _index(self) -> None:
        n = self.n_vertices
        if n < 1:
            raise ValueError("tree needs at least one vertex")
        if not (len(self.edge_u) == len(self.edge_v) == len(self.edge_len)):
            raise ValueError("edge arrays disagree in length")
        if len(self.edge_u) != n - 1:
            raise ValueError(f"{len(self.edge_u)} edges cannot span "
                             f"{n} vertices acyclically")
        adj: List[List[Tuple[int, int]]] = [[] for _ in range(n)]
        for e in range(n - 1):
            u, v = self.edge_u[e], self.edge_v[e]
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge {e} references a missing vertex")
            if self.edge_len[e] <= 0.0:
                raise ValueError(f"edge {e} has non-positive length")
            adj[u].append((v, e))
            adj[v].append((u, e))
        parent = [-1] * n
        parent_edge = [-1] * n
        hops = [0] * n
        depth = [0.0] * n
        order = [0]
        seen = [False] * n
        seen[0] = True
        for x in order:
            for y, e in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    parent_edge[y] = e
                    hops[y] = hops[x] + 1
                    depth[y] = depth[x] + self.edge_len[e]
                    order.append(y)
        if len(order) != n:
            raise ValueError("tree is not connected")
        for e in range(n - 1):
            if parent[self.edge_v[e]] != self.edge_u[e]:
                raise ValueError(f"edge {e} is not oriented away from the root")
        self._parent = parent
        self._parent_edge = parent_edge
        self._hops = hops
        self._depth = depth

    # construction helpers

    @classmethod
    def single_point(cls) -> "MetricTree":
        return cls(1, [], [], [])

    @classmethod
    def single_edge(cls, length: float) -> "MetricTree":
        return cls(2, [0], [1], [length])

    def copy(self) -> "MetricTree":
        t = MetricTree.__new__(MetricTree)
        t.n_vertices = self.n_vertices
        t.edge_u = list(self.edge_u)
        t.edge_v = list(self.edge_v)
        t.edge_len = list(self.edge_len)
        t.marks = dict(self.marks)
        t._parent = self._parent
        t._parent_edge = self._parent_edge
        t._hops = self._hops
        t._depth = self._depth
        return t

    # basic queries

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    @property
    def total_length(self) -> float:
        return math.fsum(self.edge_len)

    def degrees(self) -> List[int]:
        deg = [0] * self.n_vertices
        for e in range(self.n_edges):
            deg[self.edge_u[e]] += 1
            deg[self.edge_v[e]] += 1
        return deg

    def leaves(self) -> List[int]:
        """Non-root vertices of degree 1."""
        deg = self.degrees()
        return [v for v in range(self.n_vertices)
                if deg[v] == 1 and v != self.root]

    def check_location(self, loc) -> PointLocation:
        e, off = loc
        e = int(e)
        off = float(off)
        if not (0 <= e < self.n_edges):
            raise LocationError(f"edge {e} does not exist")
        if not (0.0 <= off <= self.edge_len[e]):
            raise LocationError(
                f"offset {off!r} outside edge {e} of length {self.edge_len[e]!r}")
        return PointLocation(e, off)

    def location_of_vertex(self, v: int) -> PointLocation:
        """A (edge, offset) address for a vertex."""
        if not (0 <= v < self.n_vertices):
            raise LocationError(f"vertex {v} does not exist")
        if v == self.root:
            if self.n_edges == 0:
                raise LocationError("a single point has no edges to address")
            for e in range(self.n_edges):
                if self.edge_u[e] == self.root:
                    return PointLocation(e, 0.0)
            raise LocationError("root has no outgoing edge")  # unreachable
        e = self._parent_edge[v]
        return PointLocation(e, self.edge_len[e])

    def add_mark(self, name: str, loc) -> None:
        if not name or any(ch.isspace() for ch in name):
            raise ValueError(f"mark name {name!r} must be non-empty and "
                             "whitespace-free")
        if name in self.marks:
            raise ValueError(f"duplicate mark {name!r}")
        self.marks[name] = self.check_location(loc)

    def mark_location(self, name: str) -> PointLocation:
        try:
            return self.marks[name]
        except KeyError:
            raise LocationError(f"no mark named {name!r}") from None

    # distances

    def _vertex_distance(self, x: int, y: int) -> float:
        hops, parent, depth = self._hops, self._parent, self._depth
        a, b = x, y
        while hops[a] > hops[b]:
            a = parent[a]
        while hops[b] > hops[a]:
            b = parent[b]
        while a != b:
            a = parent[a]
            b = parent[b]
        return self._depth[x] + self._depth[y] - 2.0 * self._depth[a]

    def root_distance(self, v: int) -> float:
        """Path length from the root to a vertex."""
        if not (0 <= v < self.n_vertices):
            raise LocationError(f"vertex {v} does not exist")
        return self._depth[v]

    def distance(self, p, q) -> float:
        p = self.check_location(p)
        q = self.check_location(q)
        if p.edge == q.edge:
            return abs(p.offset - q.offset)
        best = math.inf
        le, lq = self.edge_len[p.edge], self.edge_len[q.edge]
        for x, cx in ((self.edge_u[p.edge], p.offset),
                      (self.edge_v[p.edge], le - p.offset)):
            for y, cy in ((self.edge_u[q.edge], q.offset),
                          (self.edge_v[q.edge], lq - q.offset)):
                d = cx + self._vertex_distance(x, y) + cy
                if d < best:
                    best = d
        return best

    def rescaled(self, factor: float) -> "MetricTree":
        if not (factor > 0.0):
            raise ValueError(f"rescale factor must be positive, got {factor}")
        t = MetricTree(self.n_vertices, self.edge_u, self.edge_v,
                       [l * factor for l in self.edge_len])
        t.marks = {name: PointLocation(loc.edge, loc.offset * factor)
                   for name, loc in self.marks.items()}
        return t

    # serialization

    def to_text(self) -> str:
        lines = [f"V {v}" for v in range(self.n_vertices)]
        for e in range(self.n_edges):
            lines.append(f"E {e} {self.edge_u[e]} {self.edge_v[e]} "
                         f"{_fmt(self.edge_len[e])}")
        for name in sorted(self.marks):
            loc = self.marks[name]
            lines.append(f"M {name} {loc.edge} {_fmt(loc.offset)}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MetricTree":
        tree, idents = _parse_lines(text)
        if idents:
            raise ValueError("text contains identifications; "
                             "use GluedSpace.from_text")
        return tree

    def __repr__(self) -> str:
        return (f"MetricTree(vertices={self.n_vertices}, "
                f"edges={self.n_edges}, length={self.total_length:.6g}, "
                f"marks={len(self.marks)})")


def tree_distance(t: MetricTree, p, q) -> float:
    """Length of the unique path between two points of the tree."""
    return t.distance(p, q)


def rescale(t: MetricTree, factor: float) -> MetricTree:
    """Multiply every edge length (and mark offset) by factor."""
    return t.rescaled(factor)


class _Builder:
    """Mutable edge lists with eager splitting and location remapping.

    Tracked locations are two-item lists [edge, offset]; every split of
    edge e at offset a rewrites tracked locations past a onto the new
    second-half edge, so previously issued references stay valid.
    """

    def __init__(self, t: MetricTree):
        self.n_vertices = t.n_vertices
        self.edge_u = list(t.edge_u)
        self.edge_v = list(t.edge_v)
        self.edge_len = list(t.edge_len)
        self.mark_names = list(t.marks)
        self.tracked: List[List[float]] = [
            [t.marks[m].edge, t.marks[m].offset] for m in self.mark_names]

    def track(self, loc: PointLocation) -> List[float]:
        cell = [loc.edge, loc.offset]
        self.tracked.append(cell)
        return cell

    def vertex_at(self, cell: List[float]) -> int:
        e = int(cell[0])
        off = cell[1]
        if off <= 0.0:
            return self.edge_u[e]
        if off >= self.edge_len[e]:
            return self.edge_v[e]
        w = self.n_vertices
        self.n_vertices += 1
        k = len(self.edge_u)
        self.edge_u.append(w)
        self.edge_v.append(self.edge_v[e])
        self.edge_len.append(self.edge_len[e] - off)
        self.edge_v[e] = w
        self.edge_len[e] = off
        for tcell in self.tracked:
            if tcell[0] == e and tcell[1] > off:
                tcell[0] = k
                tcell[1] -= off
        return w

    def finish(self) -> MetricTree:
        t = MetricTree(self.n_vertices, self.edge_u, self.edge_v, self.edge_len)
        for name, cell in zip(self.mark_names, self.tracked):
            t.add_mark(name, PointLocation(int(cell[0]), cell[1]))
        return t


def split_at(t: MetricTree, loc) -> Tuple[MetricTree, int]:
    """Materialize a point as a vertex, splitting its edge if interior.

    Returns the new tree and the vertex id of the point.  Marks move with
    their half of the split edge.
    """
    loc = t.check_location(loc)
    b = _Builder(t)
    cell = b.track(loc)
    v = b.vertex_at(cell)
    return b.finish(), v


def graft(base: MetricTree, at_vertex: int, sub: MetricTree,
          mark_prefix: Optional[str] = None) -> Tuple[MetricTree, List[int]]:
    """Attach sub by its root at a vertex of base.

    Returns the combined tree and the vertex map: vmap[w] is the id in the
    result of sub's vertex w (vmap[0] == at_vertex).  Sub's marks come
    along, renamed with mark_prefix when given.
    """
    if not (0 <= at_vertex < base.n_vertices):
        raise LocationError(f"vertex {at_vertex} does not exist")
    n0 = base.n_vertices
    m0 = base.n_edges
    vmap = [at_vertex] + [n0 + w - 1 for w in range(1, sub.n_vertices)]
    eu = base.edge_u + [vmap[u] for u in sub.edge_u]
    ev = base.edge_v + [vmap[v] for v in sub.edge_v]
    elen = base.edge_len + sub.edge_len
    t = MetricTree(n0 + sub.n_vertices - 1, eu, ev, elen)
    for name, loc in base.marks.items():
        t.add_mark(name, loc)
    for name, loc in sub.marks.items():
        out = name if mark_prefix is None else mark_prefix + name
        t.add_mark(out, PointLocation(loc.edge + m0, loc.offset))
    return t, vmap


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


class GluedSpace:
    """A tree skeleton plus vertex identifications; a finite quotient metric.

    Identification points are materialized as skeleton vertices up front,
    so every query works on a static graph whose nodes are vertex classes.
    """

    __slots__ = ("skeleton", "vertex_pairs", "_rep", "_adj", "_dist_cache")

    def __init__(self, skeleton: MetricTree,
                 vertex_pairs: Sequence[Tuple[int, int]]):
        self.skeleton = skeleton
        self.vertex_pairs = [(int(a), int(b)) for a, b in vertex_pairs]
        uf = _UnionFind(skeleton.n_vertices)
        for a, b in self.vertex_pairs:
            if not (0 <= a < skeleton.n_vertices
                    and 0 <= b < skeleton.n_vertices):
                raise LocationError(f"identified vertex pair ({a}, {b}) "
                                    "off the skeleton")
            uf.union(a, b)
        self._rep = [uf.find(v) for v in range(skeleton.n_vertices)]
        adj: Dict[int, List[Tuple[int, float]]] = {}
        for e in range(skeleton.n_edges):
            ru = self._rep[skeleton.edge_u[e]]
            rv = self._rep[skeleton.edge_v[e]]
            if ru == rv:
                continue  # a loop arc never shortens a vertex-to-vertex path
            w = skeleton.edge_len[e]
            adj.setdefault(ru, []).append((rv, w))
            adj.setdefault(rv, []).append((ru, w))
        self._adj = adj
        self._dist_cache: Dict[int, Dict[int, float]] = {}

    @property
    def n_identifications(self) -> int:
        return len(self.vertex_pairs)

    @property
    def total_length(self) -> float:
        return self.skeleton.total_length

    def rep_of_vertex(self, v: int) -> int:
        return self._rep[v]

    def _dist_from(self, src: int) -> Dict[int, float]:
        got = self._dist_cache.get(src)
        if got is not None:
            return got
        dist = {src: 0.0}
        heap = [(0.0, src)]
        while heap:
            d, x = heapq.heappop(heap)
            if d > dist.get(x, math.inf):
                continue
            for y, w in self._adj.get(x, ()):
                nd = d + w
                if nd < dist.get(y, math.inf):
                    dist[y] = nd
                    heapq.heappush(heap, (nd, y))
        self._dist_cache[src] = dist
        return dist

    def distance(self, p, q) -> float:
        sk = self.skeleton
        p = sk.check_location(p)
        q = sk.check_location(q)
        best = math.inf
        if p.edge == q.edge:
            best = abs(p.offset - q.offset)
        lp, lq = sk.edge_len[p.edge], sk.edge_len[q.edge]
        ends_p = ((self._rep[sk.edge_u[p.edge]], p.offset),
                  (self._rep[sk.edge_v[p.edge]], lp - p.offset))
        ends_q = ((self._rep[sk.edge_u[q.edge]], q.offset),
                  (self._rep[sk.edge_v[q.edge]], lq - q.offset))
        for x, cx in ends_p:
            dx = self._dist_from(x)
            for y, cy in ends_q:
                via = dx.get(y, math.inf)
                d = cx + via + cy
                if d < best:
                    best = d
        return best

    def rescaled(self, factor: float) -> "GluedSpace":
        return GluedSpace(self.skeleton.rescaled(factor), self.vertex_pairs)

    def to_text(self) -> str:
        parts = [self.skeleton.to_text()]
        for a, b in self.vertex_pairs:
            la = self.skeleton.location_of_vertex(a)
            lb = self.skeleton.location_of_vertex(b)
            parts.append(f"I {la.edge} {_fmt(la.offset)} "
                         f"{lb.edge} {_fmt(lb.offset)}\n")
        return "".join(parts)

    @classmethod
    def from_text(cls, text: str) -> "GluedSpace":
        tree, idents = _parse_lines(text)
        return glue(tree, idents)

    def __repr__(self) -> str:
        return (f"GluedSpace(vertices={self.skeleton.n_vertices}, "
                f"edges={self.skeleton.n_edges}, "
                f"identifications={len(self.vertex_pairs)}, "
                f"length={self.total_length:.6g})")


def glue(t: MetricTree, pairs: Sequence[Tuple]) -> GluedSpace:
    """Quotient a tree by identifying point pairs.

    Each point is materialized as a skeleton vertex first (splitting edges
    as needed), then the vertex classes are merged for distance queries.
    """
    checked = [(t.check_location(p), t.check_location(q)) for p, q in pairs]
    b = _Builder(t)
    cells = [(b.track(p), b.track(q)) for p, q in checked]
    vertex_pairs = []
    for cp, cq in cells:
        va = b.vertex_at(cp)
        vb = b.vertex_at(cq)
        vertex_pairs.append((va, vb))
    return GluedSpace(b.finish(), vertex_pairs)


def glued_distance(s: GluedSpace, p, q) -> float:
    """Exact quotient shortest-path distance between two skeleton points."""
    return s.distance(p, q)


def distance_matrix(s: GluedSpace, points: Sequence) -> List[List[float]]:
    """Pairwise glued distances; zero diagonal, symmetric by construction."""
    pts = [s.skeleton.check_location(p) for p in points]
    n = len(pts)
    out = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = s.distance(pts[i], pts[j])
            out[i][j] = d
            out[j][i] = d
    return out


def _parse_lines(text: str):
    vertex_ids = set()
    edges: Dict[int, Tuple[int, int, float]] = {}
    marks: List[Tuple[str, int, float]] = []
    idents: List[Tuple[PointLocation, PointLocation]] = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        tag = parts[0]
        try:
            if tag == "V" and len(parts) == 2:
                vertex_ids.add(int(parts[1]))
            elif tag == "E" and len(parts) == 5:
                e = int(parts[1])
                if e in edges:
                    raise ValueError(f"duplicate edge id {e}")
                edges[e] = (int(parts[2]), int(parts[3]), float(parts[4]))
            elif tag == "M" and len(parts) == 4:
                marks.append((parts[1], int(parts[2]), float(parts[3])))
            elif tag == "I" and len(parts) == 5:
                idents.append((PointLocation(int(parts[1]), float(parts[2])),
                               PointLocation(int(parts[3]), float(parts[4]))))
            else:
                raise ValueError(f"unrecognized record {tag!r}")
        except ValueError as exc:
            raise ValueError(f"line {ln}: {exc}") from None
    n = len(vertex_ids)
    if vertex_ids != set(range(n)):
        raise ValueError("vertex ids must be exactly 0..n-1")
    if set(edges) != set(range(len(edges))):
        raise ValueError("edge ids must be exactly 0..m-1")
    eu = [edges[e][0] for e in range(len(edges))]
    ev = [edges[e][1] for e in range(len(edges))]
    elen = [edges[e][2] for e in range(len(edges))]
    tree = MetricTree(n, eu, ev, elen)
    for name, e, off in marks:
        tree.add_mark(name, PointLocation(e, off))
    return tree, idents


def parse_text(text: str):
    """Parse the line format; a GluedSpace when I records appear, else a tree."""
    tree, idents = _parse_lines(text)
    if idents:
        return glue(tree, idents)
    return tree
