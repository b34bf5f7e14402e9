"""Finite G(n,p) reference pipeline: generation, decomposition, harvesting.

Graphs are generated by geometric edge skipping (expected work linear in
n plus the edge count), components extracted with a sparse union, and
each component decomposed into surplus, 2-core, and kernel so finite-n
observables can be compared against the limit laws after n^(-1/3)
rescaling and per-component mass normalization.
"""

from __future__ import annotations

import math
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from . import backend
from .dist import ParameterError
from .kernel import Multigraph
from .rng import RngStream

__all__ = [
    "SparseGraph",
    "Component",
    "ComponentSummary",
    "HarvestShortfall",
    "sample_gnp",
    "sample_gnp_components",
    "decompose",
    "critical_p",
    "harvest_conditioned",
    "harvest_batches",
]


class SparseGraph:
    """Simple undirected graph as parallel edge-endpoint arrays."""

    __slots__ = ("n", "edge_u", "edge_v")

    def __init__(self, n: int, edge_u: np.ndarray, edge_v: np.ndarray):
        self.n = int(n)
        self.edge_u = np.asarray(edge_u, dtype=np.int64)
        self.edge_v = np.asarray(edge_v, dtype=np.int64)

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    def adjacency(self) -> List[List[int]]:
        adj: List[List[int]] = [[] for _ in range(self.n)]
        for u, v in zip(self.edge_u.tolist(), self.edge_v.tolist()):
            adj[u].append(v)
            adj[v].append(u)
        return adj


class Component(NamedTuple):
    n_vertices: int
    edge_u: np.ndarray  # local vertex ids 0..n_vertices-1
    edge_v: np.ndarray
    vertices: np.ndarray  # original ids, local id i -> vertices[i]

    @property
    def n_edges(self) -> int:
        return len(self.edge_u)

    @property
    def surplus(self) -> int:
        return self.n_edges - self.n_vertices + 1


class ComponentSummary(NamedTuple):
    size: int
    surplus: int
    core_edge_count: int
    kernel: Optional[Multigraph]  # None iff surplus <= 1
    core_path_lengths: Tuple[float, ...]  # per kernel edge, ascending
    cycle_length: Optional[float]  # surplus 1 only
    rescale_factor: float  # n^(-1/3) of the ambient graph
    sigma_hat: Optional[float] = None  # harvest: size * n^(-2/3)
    normalized_lengths: Tuple[float, ...] = ()  # harvest: mass-1 units


def critical_p(n: int, lam: float) -> float:
    """Edge probability 1/n + lambda * n^(-4/3) inside the scaling window."""
    p = 1.0 / n + lam * n ** (-4.0 / 3.0)
    if not (0.0 < p < 1.0):
        raise ParameterError(f"p = {p!r} outside (0, 1) for n={n}, "
                             f"lambda={lam}")
    return p


def sample_gnp(stream: RngStream, n: int, p: float) -> SparseGraph:
    """One G(n, p) draw; each of the n(n-1)/2 pairs present independently."""
    if n < 1:
        raise ParameterError(f"need at least one vertex, got {n}")
    if not (0.0 < p < 1.0):
        raise ParameterError(f"edge probability must be in (0, 1), got {p}")
    us, vs, stream._pos = backend.impl.gnp_edges_engine(stream._pos, n, p)
    return SparseGraph(n, us, vs)


def components_of(graph: SparseGraph, min_size: int = 1,
                  max_size: Optional[int] = None) -> List[Component]:
    """Connected components in first-vertex order, size filter applied."""
    n = graph.n
    if graph.n_edges == 0:
        if min_size > 1:
            return []
        one = np.empty(0, dtype=np.int64)
        return [Component(1, one, one, np.array([v], dtype=np.int64))
                for v in range(n)]
    mat = sparse.coo_matrix(
        (np.ones(graph.n_edges, dtype=np.int8), (graph.edge_u, graph.edge_v)),
        shape=(n, n)).tocsr()
    n_comp, labels = connected_components(mat, directed=False)
    sizes = np.bincount(labels, minlength=n_comp)
    keep = sizes >= min_size
    if max_size is not None:
        keep &= sizes <= max_size
    cand = np.flatnonzero(keep)
    if len(cand) == 0:
        return []
    edge_labels = labels[graph.edge_u]
    if len(cand) <= 32:
        # few qualifying components: mask each one directly instead of
        # paying the full argsort grouping on every graph
        out = []
        for c in cand.tolist():
            verts = np.flatnonzero(labels == c)
            local = np.empty(n, dtype=np.int64)
            local[verts] = np.arange(len(verts), dtype=np.int64)
            emask = edge_labels == c
            out.append(Component(int(sizes[c]),
                                 local[graph.edge_u[emask]],
                                 local[graph.edge_v[emask]],
                                 verts))
        return out
    order = np.argsort(labels, kind="stable")
    starts = np.searchsorted(labels[order], np.arange(n_comp))
    local = np.empty(n, dtype=np.int64)
    local[order] = np.arange(n, dtype=np.int64) - starts[labels[order]]
    eorder = np.argsort(edge_labels, kind="stable")
    estarts = np.searchsorted(edge_labels[eorder], np.arange(n_comp + 1))
    out = []
    for c in cand.tolist():
        verts = order[starts[c]:starts[c] + sizes[c]]
        eslice = eorder[estarts[c]:estarts[c + 1]]
        out.append(Component(int(sizes[c]),
                             local[graph.edge_u[eslice]],
                             local[graph.edge_v[eslice]],
                             verts))
    return out


def sample_gnp_components(stream: RngStream, n: int, p: float,
                          min_size: int = 1,
                          max_size: Optional[int] = None) -> List[Component]:
    return components_of(sample_gnp(stream, n, p), min_size=min_size,
                         max_size=max_size)


def _peel_to_core(comp: Component):
    """Iteratively strip degree-1 vertices; return (alive flags, degrees)."""
    n = comp.n_vertices
    deg = np.zeros(n, dtype=np.int64)
    np.add.at(deg, comp.edge_u, 1)
    np.add.at(deg, comp.edge_v, 1)
    adj: List[List[int]] = [[] for _ in range(n)]
    for e in range(comp.n_edges):
        u = int(comp.edge_u[e])
        v = int(comp.edge_v[e])
        adj[u].append(v)
        adj[v].append(u)
    alive = [True] * n
    queue = [v for v in range(n) if deg[v] == 1]
    for v in queue:
        alive[v] = False
        for w in adj[v]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    queue.append(w)
    return alive, deg, adj


def decompose(comp: Component, ambient_n: int) -> ComponentSummary:
    """Surplus, 2-core, and kernel of one connected component.

    The core is the leaf-peeling fixed point restricted to degree >= 2;
    the kernel contracts its maximal degree-2 paths, keeping each path's
    edge count as the kernel edge's length.  Kernels are reported for
    surplus >= 2 only and need not be 3-regular at finite n.
    """
    if ambient_n < 1:
        raise ParameterError("ambient_n must be positive")
    surplus = comp.surplus
    factor = float(ambient_n) ** (-1.0 / 3.0)
    alive, deg, adj = _peel_to_core(comp)
    core_vertices = [v for v in range(comp.n_vertices)
                     if alive[v] and deg[v] >= 2]
    in_core = [False] * comp.n_vertices
    for v in core_vertices:
        in_core[v] = True
    core_edges = [e for e in range(comp.n_edges)
                  if in_core[int(comp.edge_u[e])]
                  and in_core[int(comp.edge_v[e])]]
    core_edge_count = len(core_edges)

    if surplus <= 0:
        return ComponentSummary(comp.n_vertices, surplus, core_edge_count,
                                None, (), None, factor)
    if surplus == 1:
        # the core of a unicyclic component is its unique cycle
        return ComponentSummary(comp.n_vertices, surplus, core_edge_count,
                                None, (), float(core_edge_count), factor)

    inc: Dict[int, List[int]] = {v: [] for v in core_vertices}
    for e in core_edges:
        inc[int(comp.edge_u[e])].append(e)
        inc[int(comp.edge_v[e])].append(e)
    cdeg = {v: len(inc[v]) for v in core_vertices}
    branch = [v for v in core_vertices if cdeg[v] >= 3]
    index = {v: i for i, v in enumerate(branch)}
    visited = set()
    kernel_edges: List[Tuple[int, int]] = []
    path_lengths: List[int] = []
    for a in branch:
        for e0 in inc[a]:
            if e0 in visited:
                continue
            visited.add(e0)
            prev_edge = e0
            u0, v0 = int(comp.edge_u[e0]), int(comp.edge_v[e0])
            cur = v0 if u0 == a else u0
            length = 1
            while cdeg[cur] == 2:
                nxt = inc[cur][0] if inc[cur][0] != prev_edge else inc[cur][1]
                visited.add(nxt)
                uu, vv = int(comp.edge_u[nxt]), int(comp.edge_v[nxt])
                cur = vv if uu == cur else uu
                prev_edge = nxt
                length += 1
            kernel_edges.append((index[a], index[cur]))
            path_lengths.append(length)
    kern = Multigraph(len(branch), kernel_edges)
    return ComponentSummary(comp.n_vertices, surplus, core_edge_count, kern,
                            tuple(float(x) for x in sorted(path_lengths)),
                            None, factor)


class HarvestShortfall(RuntimeError):
    """Graph budget ran out before the target count; carries the partial
    harvest in .collected."""

    def __init__(self, collected, wanted: int, graphs_used: int):
        super().__init__(f"collected {len(collected)} of {wanted} components "
                         f"after {graphs_used} graphs")
        self.collected = collected
        self.wanted = wanted
        self.graphs_used = graphs_used


def _normalize(summary: ComponentSummary, n: int) -> ComponentSummary:
    """Attach sigma_hat and mass-1 lengths: graph distance x n^(-1/3),
    then / sqrt(sigma_hat)."""
    sigma = summary.size * float(n) ** (-2.0 / 3.0)
    scale = summary.rescale_factor / math.sqrt(sigma)
    if summary.surplus == 1:
        lens = (summary.cycle_length * scale,)
    elif summary.surplus >= 2:
        lens = tuple(x * scale for x in summary.core_path_lengths)
    else:
        lens = ()
    return summary._replace(sigma_hat=sigma, normalized_lengths=lens)


def harvest_batch(stream: RngStream, n: int, lam: float,
                  surpluses: Sequence[int], window: Tuple[float, float],
                  graph_range: Tuple[int, int]) -> List[Tuple[int, ComponentSummary]]:
    """Qualifying components from graphs graph_range[0]..graph_range[1]-1.

    Graph i always uses the child stream "graph-i", so the result set is
    a pure function of the master seed, independent of batching.  Returns
    (graph index, normalized summary) pairs in scan order.
    """
    p = critical_p(n, lam)
    lo = window[0] * n ** (2.0 / 3.0)
    hi = window[1] * n ** (2.0 / 3.0)
    if not (0 < lo <= hi):
        raise ParameterError(f"empty size window {window!r}")
    want = set(int(k) for k in surpluses)
    found = []
    min_size = max(1, int(math.ceil(lo)))
    max_size = int(math.floor(hi))
    for i in range(graph_range[0], graph_range[1]):
        comps = sample_gnp_components(stream.child(f"graph-{i}"), n, p,
                                      min_size=min_size, max_size=max_size)
        for comp in comps:
            if comp.surplus not in want:
                continue
            summary = _normalize(decompose(comp, n), n)
            found.append((i, summary))
    return found


def harvest_conditioned(stream: RngStream, n: int, lam: float, surplus: int,
                        window: Tuple[float, float], count: int,
                        max_graphs: Optional[int] = None,
                        batch: int = 256) -> List[ComponentSummary]:
    """Collect components of one surplus inside a size window.

    Sizes are windowed in multiples of n^(2/3); each kept component gets
    sigma_hat and mass-normalized lengths attached.  Raises
    HarvestShortfall with the partial list if max_graphs runs out.
    """
    if count < 1:
        raise ParameterError("count must be at least 1")
    if max_graphs is None:
        max_graphs = max(20000, 400 * count)
    out: List[ComponentSummary] = []
    start = 0
    while start < max_graphs:
        stop = min(start + batch, max_graphs)
        for _, summary in harvest_batch(stream, n, lam, (surplus,), window,
                                        (start, stop)):
            out.append(summary)
            if len(out) == count:
                return out
        start = stop
    raise HarvestShortfall(out, count, max_graphs)


def harvest_batches(stream: RngStream, n: int, lam: float,
                    targets: Dict[int, int], window: Tuple[float, float],
                    max_graphs: int, batch: int = 256):
    """Shared-stream harvest for several surpluses at once.

    targets maps surplus -> wanted count; one pass over the graph stream
    fills every bucket.  Returns {surplus: [summaries]}; raises
    HarvestShortfall (with the dict attached) when the budget ends first.
    """
    want = {int(k): int(c) for k, c in targets.items()}
    got: Dict[int, List[ComponentSummary]] = {k: [] for k in want}
    start = 0
    while start < max_graphs:
        stop = min(start + batch, max_graphs)
        pending = [k for k in want if len(got[k]) < want[k]]
        for _, summary in harvest_batch(stream, n, lam, pending, window,
                                        (start, stop)):
            bucket = got[summary.surplus]
            if len(bucket) < want[summary.surplus]:
                bucket.append(summary)
        if all(len(got[k]) >= want[k] for k in want):
            return got
        start = stop
    short = HarvestShortfall([s for v in got.values() for s in v],
                             sum(want.values()), max_graphs)
    short.collected = got
    raise short
