"""3-regular multigraph kernels: weights, pairing-model sampling, enumeration.

A kernel on 2(k-1) vertices carries weight (2^t * prod mult(e)!)^(-1),
t the loop count.  Sampling pairs up three half-edges per vertex uniformly
and rejects disconnected outcomes; enumeration walks all labeled connected
3-regular multigraphs and groups them by isomorphism, weighting each class
by (labeled count) * weight, which is proportional to how often the
pairing model produces it.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Dict, Iterable, List, NamedTuple, Sequence, Tuple

from .dist import ParameterError
from .rng import RngStream

__all__ = [
    "Multigraph",
    "KernelClass",
    "kernel_weight",
    "sample_kernel",
    "enumerate_kernels",
    "THETA",
    "DUMBBELL",
]


class Multigraph:
    """Undirected multigraph on vertices 0..n-1; loops allowed.

    Edges are stored as a lex-sorted tuple of (u, v) pairs with u <= v,
    one entry per parallel copy, so equality is multiset equality.
    """

    __slots__ = ("n_vertices", "edges")

    def __init__(self, n_vertices: int, edges: Iterable[Tuple[int, int]]):
        self.n_vertices = int(n_vertices)
        if self.n_vertices < 1:
            raise ParameterError("multigraph needs at least one vertex")
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ParameterError(f"edge ({u}, {v}) references a missing "
                                     "vertex")
            norm.append((u, v) if u <= v else (v, u))
        norm.sort()
        self.edges = tuple(norm)

    def __eq__(self, other) -> bool:
        return (isinstance(other, Multigraph)
                and self.n_vertices == other.n_vertices
                and self.edges == other.edges)

    def __hash__(self) -> int:
        return hash((self.n_vertices, self.edges))

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def multiplicities(self) -> Dict[Tuple[int, int], int]:
        out: Dict[Tuple[int, int], int] = {}
        for e in self.edges:
            out[e] = out.get(e, 0) + 1
        return out

    def loop_count(self) -> int:
        return sum(1 for u, v in self.edges if u == v)

    def degrees(self) -> List[int]:
        deg = [0] * self.n_vertices
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1  # a loop contributes 2 to its vertex
        return deg

    def is_three_regular(self) -> bool:
        return all(d == 3 for d in self.degrees())

    def is_connected(self) -> bool:
        if self.n_vertices == 1:
            return True
        adj: List[List[int]] = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            if u != v:
                adj[u].append(v)
                adj[v].append(u)
        seen = [False] * self.n_vertices
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        return count == self.n_vertices

    def relabeled(self, perm: Sequence[int]) -> "Multigraph":
        return Multigraph(self.n_vertices,
                          [(perm[u], perm[v]) for u, v in self.edges])

    def canonical_form(self) -> Tuple[Tuple[int, int], ...]:
        return _canonical(self.n_vertices, self.edges)

    def to_text(self) -> str:
        if self.n_vertices % 2 != 0:
            raise ParameterError("kernel text format needs an even vertex "
                                 "count")
        k = self.n_vertices // 2 + 1
        lines = [f"k {k} vertices {self.n_vertices}"]
        for (u, v), mult in sorted(self.multiplicities().items()):
            lines.append(f"{u} {v} {mult}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Multigraph":
        lines = [ln.strip() for ln in text.splitlines()
                 if ln.strip() and not ln.strip().startswith("#")]
        if not lines:
            raise ParameterError("empty kernel text")
        head = lines[0].split()
        if len(head) != 4 or head[0] != "k" or head[2] != "vertices":
            raise ParameterError(f"bad kernel header {lines[0]!r}")
        k = int(head[1])
        n = int(head[3])
        if n != 2 * (k - 1):
            raise ParameterError(f"header claims k={k} but {n} vertices")
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ParameterError(f"bad kernel edge line {ln!r}")
            u, v, mult = int(parts[0]), int(parts[1]), int(parts[2])
            if mult < 1:
                raise ParameterError(f"multiplicity {mult} is not positive")
            edges.extend([(u, v)] * mult)
        return cls(n, edges)

    def __repr__(self) -> str:
        return f"Multigraph(n_vertices={self.n_vertices}, edges={self.edges})"


_canon_cache: Dict[Tuple[int, Tuple[Tuple[int, int], ...]],
                   Tuple[Tuple[int, int], ...]] = {}


def _canonical(n: int, edges: Tuple[Tuple[int, int], ...]):
    key = (n, edges)
    got = _canon_cache.get(key)
    if got is not None:
        return got
    best = None
    for perm in itertools.permutations(range(n)):
        cand = tuple(sorted((perm[u], perm[v]) if perm[u] <= perm[v]
                            else (perm[v], perm[u]) for u, v in edges))
        if best is None or cand < best:
            best = cand
    _canon_cache[key] = best
    return best


def kernel_weight_exact(K: Multigraph) -> Fraction:
    if not K.is_three_regular():
        raise ParameterError("kernel weight is defined for 3-regular "
                             "multigraphs only")
    denom = 2 ** K.loop_count()
    for mult in K.multiplicities().values():
        denom *= factorial(mult)
    return Fraction(1, denom)


def kernel_weight(K: Multigraph) -> float:
    """Unnormalized sampling weight (2^loops * prod mult!)^(-1)."""
    return float(kernel_weight_exact(K))


THETA = Multigraph(2, [(0, 1), (0, 1), (0, 1)])
DUMBBELL = Multigraph(2, [(0, 0), (0, 1), (1, 1)])


def sample_kernel(stream: RngStream, k: int) -> Multigraph:
    """Uniform pairing of 3 half-edges per vertex, resampled until connected.

    Within the connected class the pairing model hits each labeled
    multigraph proportionally to kernel_weight, which the enumeration
    tests pin down.
    """
    if k < 2:
        raise ParameterError(f"need surplus k >= 2, got {k}")
    n = 2 * (k - 1)
    n_half = 3 * n
    while True:
        pool = list(range(n_half))
        edges = []
        while pool:
            a = pool.pop()
            j = stream.randbelow(len(pool))
            b = pool.pop(j)
            edges.append((a // 3, b // 3))
        g = Multigraph(n, edges)
        if g.is_connected():
            return g


class KernelClass(NamedTuple):
    rep: Multigraph
    weight: float
    probability: float
    labeled_count: int


def _labeled_three_regular(n: int) -> List[Multigraph]:
    """All labeled 3-regular multigraphs on n vertices, by backtracking
    over pair multiplicities in lex order with degree pruning."""
    pairs = [(u, v) for u in range(n) for v in range(u, n)]
    residual = [3] * n
    out: List[Multigraph] = []
    edges: List[Tuple[int, int]] = []

    def rec(i: int) -> None:
        if i == len(pairs):
            if all(r == 0 for r in residual):
                out.append(Multigraph(n, list(edges)))
            return
        u, v = pairs[i]
        # remaining pairs can still serve u only if some pair after i touches u
        if u == v:
            cap = residual[u] // 2
            for m in range(cap + 1):
                residual[u] -= 2 * m
                edges.extend([(u, v)] * m)
                if _still_feasible(u, i, pairs, residual):
                    rec(i + 1)
                del edges[len(edges) - m:]
                residual[u] += 2 * m
        else:
            cap = min(residual[u], residual[v])
            for m in range(cap + 1):
                residual[u] -= m
                residual[v] -= m
                edges.extend([(u, v)] * m)
                if _still_feasible(u, i, pairs, residual):
                    rec(i + 1)
                del edges[len(edges) - m:]
                residual[u] += m
                residual[v] += m

    def _still_feasible(u: int, i: int, pairs, residual) -> bool:
        # once the scan leaves vertex u its residual degree must be zero
        if i + 1 < len(pairs) and pairs[i + 1][0] != u:
            return residual[u] == 0
        return True

    rec(0)
    return out


@lru_cache(maxsize=None)
def enumerate_kernels(k: int) -> Tuple[KernelClass, ...]:
    """Isomorphism classes on 2(k-1) vertices with exact probabilities."""
    if k not in (2, 3, 4):
        raise ParameterError(f"exact enumeration supports k in 2..4, got {k}")
    n = 2 * (k - 1)
    classes: Dict[Tuple[Tuple[int, int], ...], List] = {}
    total = Fraction(0)
    for g in _labeled_three_regular(n):
        if not g.is_connected():
            continue
        w = kernel_weight_exact(g)
        total += w
        canon = g.canonical_form()
        slot = classes.get(canon)
        if slot is None:
            classes[canon] = [g, w, 1]
        else:
            slot[1] += w
            slot[2] += 1
    out = []
    for canon in sorted(classes):
        rep, mass, count = classes[canon]
        out.append(KernelClass(rep=Multigraph(n, canon),
                               weight=float(kernel_weight_exact(rep)),
                               probability=float(mass / total),
                               labeled_count=count))
    return tuple(out)


def kernel_class_index(K: Multigraph, k: int) -> int:
    """Position of K's isomorphism class in enumerate_kernels(k)."""
    canon = K.canonical_form()
    for i, cls in enumerate(enumerate_kernels(k)):
        if cls.rep.canonical_form() == canon:
            return i
    raise ParameterError("kernel does not match any enumerated class")
