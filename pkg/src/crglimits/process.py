"""Inhomogeneous Poisson arrivals and the stick-breaking tree builder.

The driving point process on the half-line has instantaneous rate t at
time t, so the first arrival is Rayleigh and the gap after time c has
survival exp(-((x+c)^2 - c^2)/2).  Trees grow one segment per arrival:
the segment spans the gap and attaches at a point chosen uniformly by
length measure on the structure built so far.
"""

from __future__ import annotations

import math
import re
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import backend
from .metric_tree import LocationError, MetricTree, PointLocation
from .rng import RngStream

__all__ = [
    "ArrivalSchedule",
    "poisson_gap",
    "poisson_first_arrival",
    "sample_arrivals",
    "ExtendResult",
    "extend_tree",
    "stick_break",
]


class ArrivalSchedule(NamedTuple):
    arrival_times: Tuple[float, ...]
    gaps: Tuple[float, ...]

    @classmethod
    def from_gaps(cls, gaps: Sequence[float],
                  start: float = 0.0) -> "ArrivalSchedule":
        times = []
        t = start
        for g in gaps:
            if g <= 0.0:
                raise ValueError(f"gap {g!r} is not positive")
            t += g
            times.append(t)
        return cls(tuple(times), tuple(gaps))


def poisson_gap(stream: RngStream, last_point: float) -> float:
    """Time to the next arrival after last_point; inverse transform, exact."""
    c = float(last_point)
    if c < 0.0:
        raise ValueError(f"last_point must be non-negative, got {c}")
    g, stream._pos = backend.impl.poisson_gap(stream._pos, c)
    return g


def poisson_first_arrival(stream: RngStream) -> float:
    """First arrival; survival exp(-x^2/2), the Rayleigh law."""
    x, stream._pos = backend.impl.rayleigh(stream._pos)
    return x


def sample_arrivals(stream: RngStream, n: int,
                    start: float = 0.0) -> ArrivalSchedule:
    """The first n arrivals after a (possibly conditioned) start time."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if start < 0.0:
        raise ValueError("start must be non-negative")
    gaps = []
    t = start
    for _ in range(n):
        g = poisson_gap(stream, t)
        gaps.append(g)
        t += g
    return ArrivalSchedule.from_gaps(gaps, start=start)


class ExtendResult(NamedTuple):
    tree: MetricTree
    edge_colors: np.ndarray
    color_totals: np.ndarray
    new_leaves: List[int]
    trace_colors: np.ndarray
    trace_gaps: np.ndarray


_LEAF_RE = re.compile(r"^leaf(\d+)$")


def _next_leaf_index(marks: Dict[str, PointLocation]) -> int:
    best = 0
    for name in marks:
        m = _LEAF_RE.match(name)
        if m:
            best = max(best, int(m.group(1)))
    return best + 1


def _remap_marks(marks, eu, ev, elen, tol):
    """Re-address marks after engine splits.

    An original edge keeps its id for its first piece; each split appends
    the second piece, whose id is the smallest among the edges leaving the
    split vertex.  Walking a stale offset along that chain relocates the
    mark; the tolerance absorbs one rounding error per split.
    """
    if not marks:
        return {}
    min_child: Dict[int, int] = {}
    for e in range(len(eu)):
        min_child.setdefault(eu[e], e)
    out = {}
    for name, (e, off) in marks.items():
        o = float(off)
        while o - elen[e] > tol:
            o -= elen[e]
            w = ev[e]
            if w not in min_child:
                raise LocationError(f"mark {name!r} walked off the tree")
            e = min_child[w]
        out[name] = PointLocation(e, min(o, elen[e]))
    return out


def extend_tree(stream: RngStream, tree: MetricTree, n_segments: int,
                edge_colors: Optional[Sequence[int]] = None,
                color_totals: Optional[Sequence[float]] = None,
                want_trace: bool = False,
                mark_leaves: bool = True) -> ExtendResult:
    """Grow an existing tree by n_segments stick-breaking steps.

    edge_colors partition the edges into groups whose total lengths drive
    the attachment pick; a new segment inherits the color of the edge it
    lands on.  The per-color totals returned (and traced) match the
    continuous urn run on the same stream step for step.
    """
    if n_segments < 0:
        raise ValueError("n_segments must be non-negative")
    if tree.n_edges == 0:
        raise ValueError("cannot extend a single point; total length is zero")
    if edge_colors is None:
        colors = [0] * tree.n_edges
    else:
        colors = [int(c) for c in edge_colors]
        if len(colors) != tree.n_edges:
            raise ValueError("edge_colors length must match edge count")
    n_colors = max(colors) + 1
    if min(colors) < 0:
        raise ValueError("edge colors must be non-negative")
    if color_totals is None:
        sums = [0.0] * n_colors
        for e in range(tree.n_edges):
            sums[colors[e]] += tree.edge_len[e]
        totals = sums
    else:
        totals = [float(t) for t in color_totals]
        if len(totals) != n_colors:
            raise ValueError("color_totals length must cover every color")

    (eu, ev, elen, ecol, n_vertices, new_leaves, trace_colors, trace_gaps,
     out_totals, stream._pos) = backend.impl.stick_break_engine(
        stream._pos, n_segments, 0, tree.edge_u, tree.edge_v, tree.edge_len,
        colors, totals, tree.n_vertices, 1 if want_trace else 0)

    out = MetricTree(int(n_vertices), eu, ev, elen)
    tol = 1e-12 * (1.0 + float(np.sum(elen)))
    for name, loc in _remap_marks(tree.marks, eu, ev, elen, tol).items():
        out.add_mark(name, loc)
    leaves = [int(v) for v in new_leaves]
    if mark_leaves:
        idx = _next_leaf_index(out.marks)
        for j, v in enumerate(leaves):
            out.add_mark(f"leaf{idx + j}", out.location_of_vertex(v))
    return ExtendResult(out, ecol, out_totals, leaves, trace_colors,
                        trace_gaps)


def stick_break(stream: RngStream, initial: Optional[MetricTree] = None,
                n_segments: int = 1) -> MetricTree:
    """Build or grow a tree by uniform-attachment stick breaking.

    Without initial: segment 1 is the Rayleigh first arrival and the
    result has n_segments leaves and 2*n_segments - 1 edges, the leaves
    marked leaf1..leafN.  With initial: its total length acts as the
    conditioned start time and all n_segments go on top of it.
    n_segments = 0 returns the input unchanged (or a single point).
    """
    if n_segments < 0:
        raise ValueError("n_segments must be non-negative")
    if initial is not None:
        if n_segments == 0:
            return initial.copy()
        return extend_tree(stream, initial, n_segments).tree
    if n_segments == 0:
        return MetricTree.single_point()
    (eu, ev, elen, _ecol, n_vertices, new_leaves, _tc, _tg, _totals,
     stream._pos) = backend.impl.stick_break_engine(
        stream._pos, n_segments, 1, [], [], [], [], [], 1, 0)
    out = MetricTree(int(n_vertices), eu, ev, elen)
    for j, v in enumerate(new_leaves, start=1):
        out.add_mark(f"leaf{j}", out.location_of_vertex(int(v)))
    return out
