"""Seeded verification gates: every closed-form law the samplers must
reproduce, run as deterministic Monte Carlo pass/fail checks.

Each gate is a function (stream, seed) -> [TestReport]; the registry
maps stable gate names to functions and SUITES groups them for the CLI.
Thresholds are fixed constants (roughly twice the asymptotic 99% KS
critical value at the stated sample size, looser where finite-size bias
is expected), so a given master seed always yields the same verdict.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, List, Sequence, Tuple

import numpy as np

from . import finite_graph, stats, urn
from .dist import (ParameterError, sample_duplication_index, sample_gamma,
                   sample_gamma_many, sample_rayleigh_many)
from .kernel import DUMBBELL, THETA, enumerate_kernels, sample_kernel
from .limit_sampler import (sample_component_p1, sample_component_p2,
                            sample_core_lengths)
from .metric_tree import MetricTree, PointLocation, glue
from .process import stick_break
from .rng import RngStream
from .stats import TestReport, make_report

__all__ = ["GATES", "SUITES", "gate_names", "run_gates",
            "brute_force_glued_distance"]

GateFn = Callable[[RngStream, int], List[TestReport]]


def _gate_crt_root(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    dist = np.empty(n)
    for i in range(n):
        t = stick_break(stream, n_segments=1)
        dist[i] = t.distance(t.location_of_vertex(0), t.marks["leaf1"])
    d = stats.ks_one_sample(dist, stats.cdf_rayleigh)
    return [make_report("crt-root-law", n, d, 0.01, seed)]


def _gate_crt_lengths(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    tot = np.empty(n)
    for i in range(n):
        tot[i] = stick_break(stream, n_segments=6).total_length
    d = stats.ks_one_sample(tot * tot, lambda x: stats.cdf_gamma(x, 6.0, 0.5))
    return [make_report("crt-stick-lengths", n, d, 0.01, seed)]


def _gate_unicyclic(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    cyc = np.empty(n)
    for i in range(n):
        comp = sample_component_p2(stream, 1, 0)
        cyc[i] = comp.provenance["cycle_length"]
    d = stats.ks_one_sample(cyc, stats.cdf_half_normal)
    mean_err = abs(float(np.mean(cyc)) - 0.8)
    return [make_report("unicyclic-cycle-ks", n, d, 0.01, seed),
            make_report("unicyclic-cycle-mean", n, mean_err, 0.02, seed)]


def _gate_lollipop(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    total = np.empty(n)
    ratio = np.empty(n)
    for i in range(n):
        comp = sample_component_p2(stream, 1, 0)
        c = comp.provenance["cycle_length"]
        s = comp.provenance["stem"]
        total[i] = c + s
        ratio[i] = c / (c + s)
    d1 = stats.ks_one_sample(total * total,
                             lambda x: stats.cdf_gamma(x, 1.5, 0.5))
    d2 = stats.ks_one_sample(ratio, stats.cdf_uniform)
    return [make_report("lollipop-total-sq", n, d1, 0.01, seed),
            make_report("lollipop-ratio-uniform", n, d2, 0.01, seed)]


def _gate_core_lengths(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    total = np.empty(n)
    props = np.empty((n, 3))
    for i in range(n):
        core = sample_core_lengths(stream, 2)
        total[i] = core.total
        props[i] = [x / core.total for x in core.lengths]
    out = [make_report(
        "core-total-sq", n,
        stats.ks_one_sample(total * total,
                            lambda x: stats.cdf_gamma(x, 2.0, 0.5)),
        0.01, seed)]
    for j in range(3):
        d = stats.ks_one_sample(props[:, j],
                                lambda x: stats.cdf_beta(x, 1.0, 2.0))
        out.append(make_report(f"core-prop-{j}", n, d, 0.01, seed))
    return out


def _gate_kernel_law(stream: RngStream, seed: int) -> List[TestReport]:
    classes2 = enumerate_kernels(2)
    by_canon = {c.rep.canonical_form(): c.probability for c in classes2}
    exact_err = max(abs(by_canon[THETA.canonical_form()] - 0.4),
                    abs(by_canon[DUMBBELL.canonical_form()] - 0.6))
    out = [make_report("kernel-enumeration-k2", len(classes2), exact_err,
                       1e-12, seed)]

    n = 100000
    theta_canon = THETA.canonical_form()
    counts = {theta_canon: 0, DUMBBELL.canonical_form(): 0}
    for _ in range(n):
        counts[sample_kernel(stream, 2).canonical_form()] += 1
    freq_err = max(abs(counts[theta_canon] / n - 0.4),
                   abs(counts[DUMBBELL.canonical_form()] / n - 0.6))
    out.append(make_report("kernel-frequency-k2", n, freq_err, 0.01, seed))

    classes3 = enumerate_kernels(3)
    index = {c.rep.canonical_form(): i for i, c in enumerate(classes3)}
    obs = [0] * len(classes3)
    for _ in range(n):
        obs[index[sample_kernel(stream, 3).canonical_form()]] += 1
    # chi-square df = 4; 20.0 sits above the 99.9% quantile 18.47
    stat = stats.chi_square(obs, [c.probability for c in classes3])
    out.append(make_report("kernel-chisq-k3", n, stat, 20.0, seed))
    return out


def _gate_rayleigh_dirichlet(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    r = sample_rayleigh_many(stream, 3 * n).reshape(n, 3)
    gx = sample_gamma_many(stream, 0.5, 0.5, 3 * n).reshape(n, 3)
    x = gx / gx.sum(axis=1, keepdims=True)
    a = r * np.sqrt(x)
    g = sample_gamma_many(stream, 2.0, 0.5, n)
    gy = sample_gamma_many(stream, 1.0, 1.0, 3 * n).reshape(n, 3)
    y = gy / gy.sum(axis=1, keepdims=True)
    b = np.sqrt(g)[:, None] * y
    out = []
    for j in range(3):
        d = stats.ks_two_sample(a[:, j], b[:, j])
        out.append(make_report(f"rayleigh-dirichlet-coord-{j}", n, d, 0.01,
                               seed))
    d = stats.ks_two_sample(a.sum(axis=1), b.sum(axis=1))
    out.append(make_report("rayleigh-dirichlet-sum", n, d, 0.01, seed))
    return out


def _gate_cross_procedure(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    max1 = np.empty(n)
    tot1 = np.empty(n)
    for i in range(n):
        lens = sample_component_p1(stream, 2, 1).provenance[
            "kernel_path_lengths"]
        max1[i] = max(lens)
        tot1[i] = math.fsum(lens)
    max2 = np.empty(n)
    tot2 = np.empty(n)
    for i in range(n):
        lens = sample_component_p2(stream, 2, 0).provenance["core_lengths"]
        max2[i] = max(lens)
        tot2[i] = math.fsum(lens)
    return [make_report("cross-procedure-max", n,
                        stats.ks_two_sample(max1, max2), 0.015, seed),
            make_report("cross-procedure-total", n,
                        stats.ks_two_sample(tot1, tot2), 0.015, seed)]


def _gate_urn_totals(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    lengths0 = np.empty((n, 3))
    for i in range(n):
        lengths0[i] = sample_core_lengths(stream, 2).lengths
    lengths, _ = urn.urn_finals(stream, lengths0, 10)
    c = lengths.sum(axis=1)
    d = stats.ks_one_sample(c * c, lambda x: stats.cdf_gamma(x, 12.0, 0.5))
    return [make_report("urn-total-law", n, d, 0.01, seed)]


def _gate_polya_limit(stream: RngStream, seed: int) -> List[TestReport]:
    n_trials, n_steps = 10000, 10000
    counts = urn.polya_finals(stream, 2, n_steps, n_trials)
    prop = counts[:, 0] / (2.0 + 2.0 * n_steps)
    d1 = stats.ks_one_sample(prop, lambda x: stats.cdf_beta(x, 0.5, 0.5))
    out = [make_report("polya-discrete-limit", n_trials, d1, 0.02, seed)]

    n2, steps2 = 10000, 1000
    lengths0 = np.empty((n2, 3))
    for i in range(n2):
        lengths0[i] = sample_core_lengths(stream, 2).lengths
    lengths, _ = urn.urn_finals(stream, lengths0, steps2)
    prop0 = lengths[:, 0] / lengths.sum(axis=1)
    d2 = stats.ks_one_sample(prop0, lambda x: stats.cdf_beta(x, 0.5, 1.0))
    out.append(make_report("urn-proportion-limit", n2, d2, 0.02, seed))
    return out


def _gate_urn_poisson(stream: RngStream, seed: int) -> List[TestReport]:
    n_trials, n_steps = 10000, 1000
    lengths0 = np.empty((n_trials, 3))
    for i in range(n_trials):
        lengths0[i] = sample_core_lengths(stream, 2).lengths
    lengths, _ = urn.urn_finals(stream, lengths0, n_steps)
    # the first addition to a color is its initial length, so the
    # inter-jump law predicts L_0(0)/sqrt(P_0) ~ Rayleigh
    p0 = lengths[:, 0] / lengths.sum(axis=1)
    normalized = lengths0[:, 0] / np.sqrt(p0)
    ref = sample_rayleigh_many(stream, n_trials)
    d = stats.ks_two_sample(normalized, ref)
    return [make_report("urn-first-gap", n_trials, d, 0.03, seed)]


def _gate_duplication(stream: RngStream, seed: int) -> List[TestReport]:
    n = 100000
    out = []
    for t in (0.5, 1.0):
        a = sample_gamma_many(stream, t, 0.5, n)
        b = sample_gamma_many(stream, t + 0.5, 0.5, n)
        c = sample_gamma_many(stream, 2.0 * t, 1.0, n)
        d = stats.ks_two_sample(a * b, c * c)
        out.append(make_report(f"duplication-classical-t{t:g}", n, d, 0.01,
                               seed))
    r, s = 1.0, 2
    a = sample_gamma_many(stream, r, 0.5, n)
    b = sample_gamma_many(stream, r + s - 0.5, 0.5, n)
    ab = a * b
    csq = np.empty(n)
    for i in range(n):
        j = sample_duplication_index(stream, r, s)
        csq[i] = sample_gamma(stream, 2.0 * r + j - 1.0, 1.0) ** 2
    d = stats.ks_two_sample(ab, csq)
    out.append(make_report("duplication-generalized-r1-s2", n, d, 0.01, seed))
    return out


def _gate_finite_window(stream: RngStream, seed: int) -> List[TestReport]:
    n, lam, count = 50000, 0.0, 1000
    got = finite_graph.harvest_batches(stream, n, lam, {1: count, 2: count},
                                       (0.9, 1.1), max_graphs=200000)
    cycles = np.array([s.normalized_lengths[0] for s in got[1]])
    d = stats.ks_one_sample(cycles, stats.cdf_half_normal)
    out = [make_report("finite-unicyclic-cycle", count, d, 0.06, seed)]
    theta_canon = THETA.canonical_form()
    dumb_canon = DUMBBELL.canonical_form()
    n_theta = sum(1 for s in got[2]
                  if s.kernel.canonical_form() == theta_canon)
    n_dumb = sum(1 for s in got[2]
                 if s.kernel.canonical_form() == dumb_canon)
    freq_err = max(abs(n_theta / count - 0.4), abs(n_dumb / count - 0.6))
    out.append(make_report("finite-kernel-frequency", count, freq_err, 0.06,
                           seed))
    return out


def brute_force_glued_distance(tree: MetricTree,
                               pairs: Sequence[Tuple[PointLocation,
                                                     PointLocation]],
                               p: PointLocation, q: PointLocation) -> float:
    """Shortest-path oracle by exhaustive simple-path enumeration.

    Every identified pair becomes a zero-length edge and the two query
    points become explicit nodes, so no part of the production quotient
    machinery (union-find, Dijkstra, endpoint combinations) is shared.
    """
    cuts: Dict[int, List[Tuple[float, str]]] = {}
    names = []
    for idx, (loc_a, loc_b) in enumerate(pairs):
        for side, loc in (("a", loc_a), ("b", loc_b)):
            nm = f"pair{idx}{side}"
            cuts.setdefault(loc.edge, []).append((loc.offset, nm))
            names.append(nm)
    cuts.setdefault(p.edge, []).append((p.offset, "src"))
    cuts.setdefault(q.edge, []).append((q.offset, "dst"))

    edges: List[Tuple[object, object, float]] = []
    for e in range(tree.n_edges):
        u, v = int(tree.edge_u[e]), int(tree.edge_v[e])
        chain = sorted(cuts.get(e, ()), key=lambda c: c[0])
        prev, at = u, 0.0
        for off, nm in chain:
            edges.append((prev, nm, off - at))
            prev, at = nm, off
        edges.append((prev, v, tree.edge_len[e] - at))
    for idx in range(len(pairs)):
        edges.append((f"pair{idx}a", f"pair{idx}b", 0.0))

    adj: Dict[object, List[Tuple[object, float]]] = {}
    for a, b, w in edges:
        adj.setdefault(a, []).append((b, w))
        adj.setdefault(b, []).append((a, w))

    best = math.inf

    def walk(node, acc, seen):
        nonlocal best
        if acc >= best:
            return
        if node == "dst":
            best = acc
            return
        seen = seen | {node}
        for other, w in adj[node]:
            if other not in seen:
                walk(other, acc + w, seen)

    walk("src", 0.0, frozenset())
    return best


def _random_glued_case(stream: RngStream):
    n = 2 + stream.randbelow(11)
    eu, ev, elen = [], [], []
    for v in range(1, n):
        eu.append(stream.randbelow(v))
        ev.append(v)
        elen.append(0.05 + 2.0 * stream.uniform())
    tree = MetricTree(n, eu, ev, elen)

    def random_loc():
        e = stream.randbelow(n - 1)
        return PointLocation(e, stream.uniform() * elen[e])

    pairs = [(random_loc(), random_loc())
             for _ in range(stream.randbelow(3))]
    return tree, pairs, random_loc(), random_loc()


def _gate_quotient_metric(stream: RngStream, seed: int) -> List[TestReport]:
    n_cases = 1000
    worst = 0.0
    for _ in range(n_cases):
        tree, pairs, p, q = _random_glued_case(stream)
        # marks ride through the edge splits glue performs, so they are
        # the supported way to address pre-glue points afterwards
        tree.add_mark("qsrc", p)
        tree.add_mark("qdst", q)
        space = glue(tree, pairs)
        got = space.distance(space.skeleton.marks["qsrc"],
                             space.skeleton.marks["qdst"])
        want = brute_force_glued_distance(tree, pairs, p, q)
        worst = max(worst, abs(got - want))
    return [make_report("quotient-metric-oracle", n_cases, worst, 1e-9,
                        seed)]


GATES: Dict[str, GateFn] = {
    "crt-root": _gate_crt_root,
    "crt-lengths": _gate_crt_lengths,
    "unicyclic-cycle": _gate_unicyclic,
    "lollipop": _gate_lollipop,
    "core-lengths": _gate_core_lengths,
    "kernel-law": _gate_kernel_law,
    "rayleigh-dirichlet": _gate_rayleigh_dirichlet,
    "cross-procedure": _gate_cross_procedure,
    "urn-totals": _gate_urn_totals,
    "polya-limit": _gate_polya_limit,
    "urn-poisson": _gate_urn_poisson,
    "duplication": _gate_duplication,
    "finite-window": _gate_finite_window,
    "quotient-metric": _gate_quotient_metric,
}

SUITES: Dict[str, Tuple[str, ...]] = {
    "crt": ("crt-root", "crt-lengths"),
    "unicyclic": ("unicyclic-cycle", "lollipop"),
    "core": ("core-lengths",),
    "kernels": ("kernel-law",),
    "identities": ("rayleigh-dirichlet", "duplication"),
    "procedures": ("cross-procedure",),
    "urn": ("urn-totals", "polya-limit", "urn-poisson"),
    "finite": ("finite-window",),
    "metric": ("quotient-metric",),
    "all": tuple(GATES),
}


def gate_names(names: Sequence[str]) -> List[str]:
    """Expand suite names, keep gate names, preserve order, dedupe."""
    out: List[str] = []
    for nm in names:
        if nm in SUITES:
            expanded: Sequence[str] = SUITES[nm]
        elif nm in GATES:
            expanded = (nm,)
        else:
            raise ParameterError(f"unknown gate or suite: {nm!r}")
        for g in expanded:
            if g not in out:
                out.append(g)
    return out


def run_gates(names: Sequence[str], seed: int) -> List[TestReport]:
    """Run the named gates (or suites) under one master seed.

    Each gate gets its own child stream, so adding or reordering gates
    never changes another gate's draws.
    """
    reports: List[TestReport] = []
    for nm in gate_names(names):
        stream = RngStream(seed).child("gate:" + nm)
        reports.extend(GATES[nm](stream, seed))
    return reports
