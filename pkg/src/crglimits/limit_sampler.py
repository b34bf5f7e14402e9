"""Limit components at mass 1, conditioned on surplus k.

Two equivalent constructions are exposed: gluing independently rescaled
stick-break trees along a sampled kernel (procedure 1), and growing a
tree by stick-breaking continuation from a sampled core (procedure 2).
Unnormalized density evaluators for the tilted finite-dimensional laws
round out the module; they are evaluation-only by design.
"""

from __future__ import annotations

import math
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

from .dist import (ParameterError, SimplexVector, sample_dirichlet,
                   sample_gamma, size_biased_index)
from .kernel import Multigraph, sample_kernel
from .metric_tree import GluedSpace, MetricTree, graft
from .process import extend_tree, poisson_gap, stick_break
from .rng import RngStream

__all__ = [
    "CoreLengths",
    "PrecoreSample",
    "LimitComponent",
    "TreeShape",
    "sample_core_lengths",
    "sample_rooted_precore",
    "sample_component_p1",
    "sample_component_p2",
    "eval_tilted_fdd_density",
    "eval_precore_density",
]


class CoreLengths(NamedTuple):
    surplus: int
    lengths: Tuple[float, ...]
    total: float


class PrecoreSample(NamedTuple):
    core: CoreLengths
    stem: float
    attach_edge: int
    attach_offset: float


class LimitComponent(NamedTuple):
    surplus: int
    kernel: Optional[Multigraph]
    space: GluedSpace
    edge_tree_masses: Optional[SimplexVector]
    provenance: Dict[str, object]


def sample_core_lengths(stream: RngStream, k: int) -> CoreLengths:
    """Core edge lengths at surplus k.

    k=1 is the single cycle, the square root of a Gamma(1/2, 1/2); for
    k >= 2 the total is the square root of a Gamma((m+1)/2, 1/2) with
    m = 3k-3 edges, split by an independent uniform Dirichlet.
    """
    if k < 1:
        raise ParameterError(f"a core needs surplus k >= 1, got {k}")
    if k == 1:
        c = math.sqrt(sample_gamma(stream, 0.5, 0.5))
        return CoreLengths(1, (c,), c)
    m = 3 * k - 3
    total = math.sqrt(sample_gamma(stream, (m + 1) / 2.0, 0.5))
    props = sample_dirichlet(stream, (1.0,) * m)
    return CoreLengths(k, tuple(total * p for p in props), total)


def sample_rooted_precore(stream: RngStream, k: int) -> PrecoreSample:
    """Core plus the stem joining it to the root.

    k=1 draws the pair jointly as sqrt(Gamma(3/2, 1/2)) * (U, 1-U); the
    stem meets the cycle at the identified point, reported as offset 0 of
    edge 0.  For k >= 2 the stem length is the Poisson gap beyond the
    core total and attaches at a length-biased edge, uniform within it.
    """
    if k < 1:
        raise ParameterError(f"a core needs surplus k >= 1, got {k}")
    if k == 1:
        g = math.sqrt(sample_gamma(stream, 1.5, 0.5))
        u = stream.uniform()
        cycle = g * u
        stem = g * (1.0 - u)
        return PrecoreSample(CoreLengths(1, (cycle,), cycle), stem, 0, 0.0)
    core = sample_core_lengths(stream, k)
    stem = poisson_gap(stream, core.total)
    edge = size_biased_index(stream, core.lengths)
    offset = stream.uniform() * core.lengths[edge]
    return PrecoreSample(core, stem, edge, offset)


def _kernel_traversal(K: Multigraph) -> List[Tuple[int, int, int, bool]]:
    """Deterministic order for realizing kernel edges.

    Breadth-first from kernel vertex 0, scanning incident edges by index;
    yields (edge index, from vertex, to vertex, spanning).  Spanning
    entries discover their far endpoint; the rest close cycles.
    """
    n = K.n_vertices
    incident: List[List[int]] = [[] for _ in range(n)]
    for i, (u, v) in enumerate(K.edges):
        incident[u].append(i)
        if v != u:
            incident[v].append(i)
    processed = [False] * len(K.edges)
    discovered = [False] * n
    discovered[0] = True
    queue = [0]
    out = []
    for x in queue:
        for i in incident[x]:
            if processed[i]:
                continue
            processed[i] = True
            u, v = K.edges[i]
            y = v if u == x else u
            if discovered[y]:
                out.append((i, x, y, False))
            else:
                discovered[y] = True
                queue.append(y)
                out.append((i, x, y, True))
    if len(out) != len(K.edges):
        raise ParameterError("kernel is not connected")
    return out


def _assemble_core(K: Multigraph, lengths: Sequence[float]):
    """Realize a kernel with given edge lengths as a tree plus identifications.

    Spanning edges become tree edges; every other kernel edge becomes a
    pendant segment whose tip is identified with the already-realized far
    endpoint.  Edge i keeps color i so continuation can track per-edge
    growth.  Returns (tree, colors, vertex pairs, kernel-vertex map).
    """
    eu: List[int] = []
    ev: List[int] = []
    elen: List[float] = []
    colors: List[int] = []
    realized = {0: 0}
    pairs: List[Tuple[int, int]] = []
    n_tree = 1
    for i, x, y, spanning in _kernel_traversal(K):
        w = n_tree
        n_tree += 1
        eu.append(realized[x])
        ev.append(w)
        elen.append(float(lengths[i]))
        colors.append(i)
        if spanning:
            realized[y] = w
        else:
            pairs.append((w, realized[y]))
    tree = MetricTree(n_tree, eu, ev, elen)
    return tree, colors, pairs, realized


def _check_component(comp: LimitComponent) -> LimitComponent:
    k = comp.surplus
    ni = comp.space.n_identifications
    if k == 0 and (ni != 0 or comp.kernel is not None):
        raise AssertionError("surplus 0 component must be a tree")
    if k == 1 and ni != 1:
        raise AssertionError(f"surplus 1 needs one identification, got {ni}")
    if k >= 2:
        K = comp.kernel
        if K is None or not K.is_three_regular() or K.n_edges != 3 * (k - 1):
            raise AssertionError("surplus >= 2 needs a 3-regular kernel with "
                                 "3(k-1) edges")
    return comp


def sample_component_p2(stream: RngStream, k: int,
                        n_segments: int) -> LimitComponent:
    """Grow a component from a sampled core by stick-breaking continuation.

    k=0 is a plain stick-break tree; k=1 starts from the lollipop with
    total sqrt(Gamma(3/2, 1/2)) split uniformly into cycle and stem;
    k >= 2 starts from a sampled kernel with core edge lengths and
    continues from the core total.
    """
    if k < 0:
        raise ParameterError(f"surplus must be non-negative, got {k}")
    if n_segments < 0:
        raise ParameterError("n_segments must be non-negative")
    prov: Dict[str, object] = {"procedure": "p2", "k": k,
                               "n_segments": n_segments}

    if k == 0:
        tree = stick_break(stream, None, n_segments)
        comp = LimitComponent(0, None, GluedSpace(tree, []), None, prov)
        return _check_component(comp)

    if k == 1:
        g = math.sqrt(sample_gamma(stream, 1.5, 0.5))
        u = stream.uniform()
        cycle = g * u
        stem = g * (1.0 - u)
        # root --stem--> v1 --cycle--> v2, then v2 glued back onto v1
        skel = MetricTree(3, [0, 1], [1, 2], [stem, cycle])
        prov["core_lengths"] = (cycle,)
        prov["cycle_length"] = cycle
        prov["stem"] = stem
        if n_segments == 0:
            comp = LimitComponent(1, None, GluedSpace(skel, [(2, 1)]), None,
                                  prov)
            return _check_component(comp)
        prov["continuation_counter"] = stream.counter
        res = extend_tree(stream, skel, n_segments,
                          edge_colors=[0, 1], color_totals=[stem, cycle],
                          want_trace=True)
        if res.tree.n_edges != skel.n_edges + 2 * n_segments:
            raise AssertionError("attachment landed on an existing vertex")
        prov["color_totals"] = tuple(float(t) for t in res.color_totals)
        prov["trace_colors"] = tuple(int(c) for c in res.trace_colors)
        prov["trace_gaps"] = tuple(float(g) for g in res.trace_gaps)
        comp = LimitComponent(1, None, GluedSpace(res.tree, [(2, 1)]), None,
                              prov)
        return _check_component(comp)

    K = sample_kernel(stream, k)
    core = sample_core_lengths(stream, k)
    skel, colors, pairs, realized = _assemble_core(K, core.lengths)
    prov["core_lengths"] = core.lengths
    prov["core_total"] = core.total
    prov["kernel_vertex_map"] = dict(realized)
    if n_segments == 0:
        comp = LimitComponent(k, K, GluedSpace(skel, pairs), None, prov)
        return _check_component(comp)
    prov["continuation_counter"] = stream.counter
    res = extend_tree(stream, skel, n_segments, edge_colors=colors,
                      color_totals=list(core.lengths), want_trace=True)
    if res.tree.n_edges != skel.n_edges + 2 * n_segments:
        raise AssertionError("attachment landed on a kernel vertex or an "
                             "existing branch point")
    prov["color_totals"] = tuple(float(t) for t in res.color_totals)
    prov["trace_colors"] = tuple(int(c) for c in res.trace_colors)
    prov["trace_gaps"] = tuple(float(g) for g in res.trace_gaps)
    comp = LimitComponent(k, K, GluedSpace(res.tree, pairs), None, prov)
    return _check_component(comp)


def _with_mark_prefix(t: MetricTree, prefix: str) -> MetricTree:
    out = t.copy()
    out.marks = {prefix + name: loc for name, loc in t.marks.items()}
    return out


def sample_component_p1(stream: RngStream, k: int,
                        n_segments_per_tree: int) -> LimitComponent:
    """Glue independently rescaled stick-break trees along a kernel.

    Masses are Dirichlet(1/2,...,1/2) over the kernel edges (two halves
    for k=1); each edge tree is a fresh stick-break approximation rescaled
    by the square root of its mass, its root and first leaf realizing the
    edge's endpoints.  The designated uniform leaf is the endpoint of the
    first segment, whose root distance is exactly Rayleigh before
    rescaling.
    """
    if k < 0:
        raise ParameterError(f"surplus must be non-negative, got {k}")
    if n_segments_per_tree < 1:
        raise ParameterError("need at least one segment per tree")
    prov: Dict[str, object] = {"procedure": "p1", "k": k,
                               "n_segments_per_tree": n_segments_per_tree}

    if k == 0:
        tree = stick_break(stream, None, n_segments_per_tree)
        comp = LimitComponent(0, None, GluedSpace(tree, []), None, prov)
        return _check_component(comp)

    if k == 1:
        masses = sample_dirichlet(stream, (0.5, 0.5))
        t1 = stick_break(stream, None, n_segments_per_tree)
        t2 = stick_break(stream, None, n_segments_per_tree)
        s1 = t1.rescaled(math.sqrt(masses[0]))
        s2 = t2.rescaled(math.sqrt(masses[1]))
        base = _with_mark_prefix(s1, "t1.")
        combined, vmap = graft(base, 0, s2, mark_prefix="t2.")
        # root of tree 1 == root of tree 2 by the graft; close the cycle
        # by gluing tree 1's designated leaf (vertex 1) onto that root
        cycle_len = s1.root_distance(1)
        prov["cycle_length"] = cycle_len
        comp = LimitComponent(1, None, GluedSpace(combined, [(1, 0)]),
                              masses, prov)
        return _check_component(comp)

    K = sample_kernel(stream, k)
    m = K.n_edges
    masses = sample_dirichlet(stream, (0.5,) * m)
    unit_trees = [stick_break(stream, None, n_segments_per_tree)
                  for _ in range(m)]
    scaled = [unit_trees[i].rescaled(math.sqrt(masses[i])) for i in range(m)]
    path_lengths = [scaled[i].root_distance(1) for i in range(m)]

    base: Optional[MetricTree] = None
    realized: Dict[int, int] = {}
    pairs: List[Tuple[int, int]] = []
    for i, x, y, spanning in _kernel_traversal(K):
        sub = _with_mark_prefix(scaled[i], f"e{i}.")
        if base is None:
            base = sub
            realized[x] = 0
            far = 1
        else:
            base, vmap = graft(base, realized[x], sub)
            far = vmap[1]
        if spanning:
            realized[y] = far
        else:
            pairs.append((far, realized[y]))
    prov["kernel_path_lengths"] = tuple(path_lengths)
    prov["kernel_vertex_map"] = dict(realized)
    comp = LimitComponent(k, K, GluedSpace(base, pairs), masses, prov)
    return _check_component(comp)


def _as_label(key) -> frozenset:
    if isinstance(key, int):
        return frozenset((key,))
    label = frozenset(int(x) for x in key)
    if not label:
        raise ParameterError("empty vertex label")
    return label


class TreeShape:
    """Rooted binary shape with leaves 1..k, root excluded.

    Vertices are identified with the set of leaf labels below them, so a
    valid shape is a laminar family: the k singletons, the full set, and
    binary splits all the way down, 2k-1 vertices in all.  Each vertex
    stands for the line-segment joining it to its parent.
    """

    __slots__ = ("k", "vertices")

    def __init__(self, k: int, vertices):
        self.k = int(k)
        if self.k < 1:
            raise ParameterError("shape needs at least one leaf")
        verts = frozenset(_as_label(v) for v in vertices)
        full = frozenset(range(1, self.k + 1))
        for lab in verts:
            if not lab <= full:
                raise ParameterError(f"label {sorted(lab)} outside leaves "
                                     f"1..{self.k}")
        if len(verts) != 2 * self.k - 1:
            raise ParameterError(f"a binary shape on {self.k} leaves has "
                                 f"{2 * self.k - 1} vertices, got {len(verts)}")
        for i in range(1, self.k + 1):
            if frozenset((i,)) not in verts:
                raise ParameterError(f"missing leaf {i}")
        if full not in verts:
            raise ParameterError("missing the top vertex")
        for a in verts:
            for b in verts:
                inter = a & b
                if inter and inter != a and inter != b:
                    raise ParameterError("labels are not laminar")
        for lab in verts:
            if len(lab) == 1:
                continue
            children = [c for c in verts if c < lab
                        and not any(c < d < lab for d in verts)]
            if len(children) != 2 or children[0] | children[1] != lab:
                raise ParameterError(f"vertex {sorted(lab)} does not split "
                                     "into exactly two children")
        self.vertices = verts

    @classmethod
    def single_path(cls) -> "TreeShape":
        return cls(1, [(1,)])

    @classmethod
    def cherry(cls) -> "TreeShape":
        return cls(2, [(1,), (2,), (1, 2)])

    def __repr__(self) -> str:
        labs = sorted(self.vertices, key=lambda s: (len(s), sorted(s)))
        return f"TreeShape(k={self.k}, {[''.join(map(str, sorted(s))) for s in labs]})"


def eval_tilted_fdd_density(shape: TreeShape,
                            lengths: Mapping) -> float:
    """Unnormalized tilted density of a shape with per-vertex lengths.

    Product over leaves of the root-to-leaf path length, times the total,
    times exp(-total^2/2).  Lengths are keyed by vertex label (an int for
    a leaf or any iterable of leaf ints).
    """
    vals: Dict[frozenset, float] = {}
    for key, val in lengths.items():
        lab = _as_label(key)
        if lab in vals:
            raise ParameterError(f"duplicate length for {sorted(lab)}")
        vals[lab] = float(val)
    if set(vals) != set(shape.vertices):
        raise ParameterError("lengths must cover exactly the shape's vertices")
    for lab, val in vals.items():
        if not (val > 0.0):
            raise ParameterError(f"length for {sorted(lab)} must be positive")
    prod = 1.0
    for i in range(1, shape.k + 1):
        prod *= math.fsum(v for lab, v in vals.items() if i in lab)
    total = math.fsum(vals.values())
    return prod * total * math.exp(-0.5 * total * total)


def eval_precore_density(lengths: Sequence[float]) -> float:
    """Unnormalized exchangeable density of the 3k-1 pre-core lengths."""
    m = len(lengths)
    if m < 2 or m % 3 != 2:
        raise ParameterError(f"pre-core has 3k-1 segments, got {m}")
    for x in lengths:
        if not (x > 0.0):
            raise ParameterError("pre-core lengths must be positive")
    s = math.fsum(lengths)
    return s * math.exp(-0.5 * s * s)
