"""Stick-breaking growth: arrival laws, tree shape bookkeeping, and the
step-for-step coupling with the length urn."""

import math

import numpy as np
import pytest
import scipy.stats

from crglimits.metric_tree import MetricTree
from crglimits.process import (extend_tree, poisson_first_arrival,
                               poisson_gap, sample_arrivals, stick_break)
from crglimits.rng import RngStream
from crglimits.urn import make_urn_state, urn_run

N = 20000
D_BAND = 0.02


def test_first_arrival_is_rayleigh():
    s = RngStream(201)
    x = [poisson_first_arrival(s) for _ in range(N)]
    assert scipy.stats.kstest(x, scipy.stats.rayleigh().cdf).statistic \
        < D_BAND


def test_gap_conditional_law():
    # beyond time c, the squared arrival time minus c^2 is Exp(1/2):
    # P(T > t | T > c) = exp(-(t^2 - c^2)/2)
    s = RngStream(202)
    c = 1.7
    x = np.array([poisson_gap(s, c) for _ in range(N)])
    y = (x + c) ** 2 - c * c
    assert scipy.stats.kstest(y, scipy.stats.expon(scale=2.0).cdf
                              ).statistic < D_BAND


def test_sample_arrivals_schedule():
    s = RngStream(203)
    sched = sample_arrivals(s, 6, start=0.5)
    pts = list(sched.arrival_times)
    assert len(pts) == 6
    assert all(b > a for a, b in zip(pts, pts[1:]))
    assert pts[0] > 0.5
    gaps = [pts[0] - 0.5] + [b - a for a, b in zip(pts, pts[1:])]
    assert np.allclose(gaps, sched.gaps)


def test_stick_break_shape():
    s = RngStream(204)
    for n in (1, 2, 5, 9):
        t = stick_break(s.child(f"n{n}"), None, n)
        assert t.n_edges == 2 * n - 1
        assert len(t.leaves()) == n
        assert sorted(t.marks) == [f"leaf{j}" for j in range(1, n + 1)]
        # every mark sits on a leaf vertex
        for name, loc in t.marks.items():
            assert loc.offset == pytest.approx(t.edge_len[loc.edge])


def test_stick_break_zero_segments():
    t = stick_break(RngStream(1), None, 0)
    assert t.n_vertices == 1 and t.n_edges == 0
    base = stick_break(RngStream(2), None, 2)
    same = stick_break(RngStream(3), base, 0)
    assert same.to_text() == base.to_text()


def test_stick_break_total_squared_gamma():
    # n sticks: the n-th arrival time of the rate-t process, squared,
    # is Gamma(n, 1/2)
    s = RngStream(205)
    for n in (1, 3, 6):
        tot = np.array([stick_break(s.child(f"t{n}-{i}"), None,
                                    n).total_length
                        for i in range(8000)])
        d = scipy.stats.kstest(tot ** 2,
                               scipy.stats.gamma(n, scale=2.0).cdf).statistic
        assert d < 0.025


def test_extend_continues_the_same_law():
    # growing 2 then 3 more segments must equal growing 5 in one go
    a = RngStream(206)
    b = RngStream(206)
    t5 = stick_break(a, None, 5)
    t2 = stick_break(b, None, 2)
    t23 = stick_break(b, t2, 3)
    assert t23.to_text() == t5.to_text()


def test_extend_marks_new_leaves():
    s = RngStream(207)
    t = stick_break(s, None, 2)
    res = extend_tree(s, t, 2)
    assert sorted(res.tree.marks) == ["leaf1", "leaf2", "leaf3", "leaf4"]
    assert len(res.new_leaves) == 2
    assert res.tree.n_edges == t.n_edges + 4


def test_extend_validates():
    s = RngStream(208)
    with pytest.raises(ValueError):
        extend_tree(s, MetricTree.single_point(), 1)
    t = stick_break(s, None, 2)
    with pytest.raises(ValueError):
        extend_tree(s, t, -1)
    with pytest.raises(ValueError):
        extend_tree(s, t, 1, edge_colors=[0])  # wrong length
    with pytest.raises(ValueError):
        extend_tree(s, t, 1, edge_colors=[0, -1, 0])


def test_extension_couples_bitwise_with_urn():
    # the continuation and the length urn make the same draws in the
    # same order, so per-color totals agree to the last bit
    seed = 209
    steps = 40
    t = stick_break(RngStream(seed).child("base"), None, 2)
    colors = list(range(t.n_edges))
    lengths0 = list(t.edge_len)

    grow = RngStream(seed).child("run")
    res = extend_tree(grow, t, steps, edge_colors=colors, want_trace=True)

    urn_stream = RngStream(seed).child("run")
    s0 = make_urn_state(0, lengths0, (1,) * len(lengths0))
    traj = urn_run(urn_stream, s0, steps, checkpoints=(steps,))
    final = traj.states[0]

    assert grow.counter == urn_stream.counter
    assert tuple(res.color_totals) == final.lengths
    assert list(res.trace_colors) == list(traj.picks)
    assert list(res.trace_gaps) == list(traj.gaps)
    # the tree itself carries the same mass: per-color edge sums
    sums = [0.0] * len(lengths0)
    for e in range(res.tree.n_edges):
        sums[res.edge_colors[e]] += res.tree.edge_len[e]
    assert np.allclose(sums, final.lengths, rtol=0, atol=1e-9)


def test_segment_inherits_landing_color():
    s = RngStream(210)
    t = stick_break(s, None, 3)
    colors = [e % 2 for e in range(t.n_edges)]
    res = extend_tree(s, t, 6, edge_colors=colors)
    assert len(res.edge_colors) == res.tree.n_edges
    assert set(res.edge_colors) <= {0, 1}
    totals = [0.0, 0.0]
    for e in range(res.tree.n_edges):
        totals[res.edge_colors[e]] += res.tree.edge_len[e]
    assert np.allclose(totals, res.color_totals, rtol=0, atol=1e-9)
