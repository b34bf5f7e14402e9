"""Pure-Python sampling kernels.

Fallback twin of the compiled extension ``crglimits._speedups``: every
function consumes the identical number of stream draws and returns
bit-identical values.  Transcendentals (log, cos, pow) always go through
``math`` because numpy's vectorized versions may differ from libm in the
last ulp; integer mixing, arithmetic and sqrt are IEEE-exact and are
vectorized where it pays.

``pos`` arguments are absolute stream positions (uint64 as Python int);
every sampler returns the advanced position alongside its value.
"""

import math

import numpy as np

from ._rngcore import GAMMA, MASK64, mix64

name = "pure"

TWO_NEG53 = 1.0 / 9007199254740992.0
TWO_PI = 6.283185307179586

_U64_GAMMA = np.uint64(GAMMA)
_U64_30 = np.uint64(30)
_U64_27 = np.uint64(27)
_U64_31 = np.uint64(31)
_U64_11 = np.uint64(11)
_U64_MIX_A = np.uint64(0xBF58476D1CE4E5B9)
_U64_MIX_B = np.uint64(0x94D049BB133111EB)


def uniform(pos):
    """One double in the open interval (0, 1)."""
    pos = (pos + GAMMA) & MASK64
    return ((mix64(pos) >> 11) + 0.5) * TWO_NEG53, pos


def _mix64_vec(z):
    z = (z ^ (z >> _U64_30)) * _U64_MIX_A
    z = (z ^ (z >> _U64_27)) * _U64_MIX_B
    return z ^ (z >> _U64_31)


def uniform_array(pos, n):
    idx = np.uint64(pos) + np.arange(1, n + 1, dtype=np.uint64) * _U64_GAMMA
    z = _mix64_vec(idx)
    u = ((z >> _U64_11).astype(np.float64) + 0.5) * TWO_NEG53
    return u, (pos + n * GAMMA) & MASK64


def _log_loop(u):
    # math.log elementwise to keep libm rounding (numpy's SIMD log can differ).
    out = np.empty(len(u))
    lg = math.log
    for i, x in enumerate(u):
        out[i] = lg(x)
    return out


def exponential(pos, rate):
    u, pos = uniform(pos)
    return -(math.log(u) / rate), pos


def exponential_array(pos, rate, n):
    u, pos = uniform_array(pos, n)
    out = _log_loop(u)
    out /= rate
    np.negative(out, out)
    return out, pos


def rayleigh(pos):
    u, pos = uniform(pos)
    return math.sqrt(-2.0 * math.log(u)), pos


def rayleigh_array(pos, n):
    u, pos = uniform_array(pos, n)
    return np.sqrt(-2.0 * _log_loop(u)), pos


def poisson_gap(pos, c):
    u, pos = uniform(pos)
    return math.sqrt(c * c - 2.0 * math.log(u)) - c, pos


def gap_array(pos, c, n):
    u, pos = uniform_array(pos, n)
    return np.sqrt(c * c - 2.0 * _log_loop(u)) - c, pos


def normal(pos):
    u1, pos = uniform(pos)
    u2, pos = uniform(pos)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2), pos


def normal_array(pos, n):
    u, pos = uniform_array(pos, 2 * n)
    u1 = u[0::2]
    u2 = np.ascontiguousarray(u[1::2])
    r = np.sqrt(-2.0 * _log_loop(u1))
    cs = math.cos
    c = np.empty(n)
    for i in range(n):
        c[i] = cs(TWO_PI * u2[i])
    r *= c
    return r, pos


def gamma(pos, shape, rate):
    """Marsaglia-Tsang; shapes below one use the boost by U**(1/shape)."""
    if shape < 1.0:
        x, pos = gamma(pos, shape + 1.0, rate)
        u, pos = uniform(pos)
        return x * math.pow(u, 1.0 / shape), pos
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    while True:
        x, pos = normal(pos)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u, pos = uniform(pos)
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v / rate, pos
        if math.log(u) < 0.5 * x2 + d * (1.0 - v + math.log(v)):
            return d * v / rate, pos


def gamma_array(pos, shape, rate, n):
    out = np.empty(n)
    for i in range(n):
        out[i], pos = gamma(pos, shape, rate)
    return out, pos


def _select(target, weights, count):
    """First index whose cumulative weight reaches target; clamps to the last.

    The clamp covers float drift between an externally maintained total and
    the sum of weights; selection compares target against length cumsums,
    never ratios, so callers sharing weight values agree bit for bit.
    """
    acc = 0.0
    for i in range(count):
        nxt = acc + weights[i]
        if target <= nxt:
            return i, acc
        acc = nxt
    return count - 1, acc - weights[count - 1]


def stick_break_engine(pos, n_segments, fresh, edge_u, edge_v, edge_len,
                       edge_color, color_totals, n_vertices, want_trace):
    """Grow a rooted length tree segment by segment.

    fresh: start from nothing; the first segment is the Rayleigh first
    arrival and uses up one of n_segments.  Otherwise the given edges form
    the starting structure and n_segments are all added on top.

    Each growth step draws the attachment uniform first, then the gap.  The
    attachment position maps to an edge through cumulative lengths grouped
    by color (insertion order within color), which makes the induced color
    choice identical to the urn's size-biased pick under a shared stream.

    Returns (edge arrays, n_vertices, new_leaf vertices, trace_colors,
    trace_gaps, color_totals, pos).
    """
    eu = list(edge_u)
    ev = list(edge_v)
    elen = list(edge_len)
    ecol = list(edge_color)
    totals = list(color_totals)
    new_leaves = []
    trace_colors = []
    trace_gaps = []

    grand = 0.0
    for t in totals:
        grand += t

    steps = n_segments
    if fresh:
        if n_segments > 0:
            j1, pos = rayleigh(pos)
            eu.append(0)
            ev.append(1)
            elen.append(j1)
            ecol.append(0)
            totals = [j1]
            grand = j1
            n_vertices = 2
            new_leaves.append(1)
            steps = n_segments - 1
        else:
            n_vertices = 1
            steps = 0

    n_colors = len(totals)
    for _ in range(steps):
        u, pos = uniform(pos)
        target = u * grand
        color, before = _select(target, totals, n_colors)
        local = target - before
        # locate the edge inside the color group, insertion order
        chosen = -1
        acc = 0.0
        last = -1
        for ei in range(len(eu)):
            if ecol[ei] != color:
                continue
            last = ei
            nxt = acc + elen[ei]
            if local <= nxt:
                chosen = ei
                break
            acc = nxt
        if chosen < 0:
            chosen = last
            offset = elen[chosen]
        else:
            offset = local - acc
        g, pos = poisson_gap(pos, grand)
        if offset >= elen[chosen]:
            attach = ev[chosen]
        else:
            w = n_vertices
            n_vertices += 1
            eu.append(w)
            ev.append(ev[chosen])
            elen.append(elen[chosen] - offset)
            ecol.append(color)
            ev[chosen] = w
            elen[chosen] = offset
            attach = w
        leaf = n_vertices
        n_vertices += 1
        eu.append(attach)
        ev.append(leaf)
        elen.append(g)
        ecol.append(color)
        new_leaves.append(leaf)
        totals[color] += g
        grand += g
        if want_trace:
            trace_colors.append(color)
            trace_gaps.append(g)

    return (np.array(eu, dtype=np.int64), np.array(ev, dtype=np.int64),
            np.array(elen, dtype=np.float64), np.array(ecol, dtype=np.int64),
            n_vertices, np.array(new_leaves, dtype=np.int64),
            np.array(trace_colors, dtype=np.int64),
            np.array(trace_gaps, dtype=np.float64),
            np.array(totals, dtype=np.float64), pos)


def urn_engine(pos, lengths0, n_steps):
    """Single continuous-urn trajectory.

    Step: selection uniform -> size-biased color by cumulative lengths,
    then one inhomogeneous-Poisson gap from the current total; picked color
    gains the gap in length and 2 in count.

    Returns (L trajectory (n_steps+1, m), N trajectory, picked colors,
    gaps, pos).
    """
    m = len(lengths0)
    L = [float(x) for x in lengths0]
    C = 0.0
    for x in L:
        C += x
    N = [1] * m
    L_traj = np.empty((n_steps + 1, m))
    N_traj = np.empty((n_steps + 1, m), dtype=np.int64)
    picks = np.empty(n_steps, dtype=np.int64)
    gaps = np.empty(n_steps)
    L_traj[0] = L
    N_traj[0] = N
    for s in range(n_steps):
        u, pos = uniform(pos)
        i, _ = _select(u * C, L, m)
        g, pos = poisson_gap(pos, C)
        L[i] += g
        C += g
        N[i] += 2
        picks[s] = i
        gaps[s] = g
        L_traj[s + 1] = L
        N_traj[s + 1] = N
    return L_traj, N_traj, picks, gaps, pos


def urn_bulk_engine(states, lengths0, n_steps):
    """Final (L, N) of many independent urn runs, one stream per trial.

    Vectorized across trials; per trial the draw sequence matches
    urn_engine exactly (selection uniform, then gap uniform, per step).
    """
    states = states.astype(np.uint64, copy=True)
    L = np.array(lengths0, dtype=np.float64, copy=True)
    n_trials, m = L.shape
    C = L[:, 0].copy()
    for j in range(1, m):
        C += L[:, j]
    N = np.ones((n_trials, m), dtype=np.int64)
    rows = np.arange(n_trials)
    for _ in range(n_steps):
        states += _U64_GAMMA
        u1 = ((_mix64_vec(states) >> _U64_11).astype(np.float64) + 0.5) * TWO_NEG53
        target = u1 * C
        cum = np.cumsum(L, axis=1)
        idx = (target[:, None] > cum).sum(axis=1)
        np.minimum(idx, m - 1, out=idx)
        states += _U64_GAMMA
        u2 = ((_mix64_vec(states) >> _U64_11).astype(np.float64) + 0.5) * TWO_NEG53
        g = np.sqrt(C * C - 2.0 * _log_loop(u2)) - C
        L[rows, idx] += g
        C = C + g
        N[rows, idx] += 2
    return L, N, states


def polya_bulk_engine(states, counts0, n_steps):
    """Final counts of many independent discrete urn runs (+2 reinforcement)."""
    states = states.astype(np.uint64, copy=True)
    counts = np.array(counts0, dtype=np.float64, copy=True)
    n_trials, m = counts.shape
    total = counts[:, 0].copy()
    for j in range(1, m):
        total += counts[:, j]
    rows = np.arange(n_trials)
    for _ in range(n_steps):
        states += _U64_GAMMA
        u = ((_mix64_vec(states) >> _U64_11).astype(np.float64) + 0.5) * TWO_NEG53
        target = u * total
        cum = np.cumsum(counts, axis=1)
        idx = (target[:, None] > cum).sum(axis=1)
        np.minimum(idx, m - 1, out=idx)
        counts[rows, idx] += 2.0
        total += 2.0
    return counts.astype(np.int64), states


def gnp_edges_engine(pos, n, p):
    """Edge list of one G(n, p) draw by geometric skipping.

    Pairs (i, j), i < j, are visited in row-major order; one uniform is
    consumed per generated edge plus one for the final overrun.
    """
    lq = math.log1p(-p)
    total_pairs = n * (n - 1) // 2
    us = []
    vs = []
    g = -1
    row = 0
    row_start = 0  # pair index of (row, row+1)
    lg = math.log
    while True:
        pos = (pos + GAMMA) & MASK64
        u = ((mix64(pos) >> 11) + 0.5) * TWO_NEG53
        g += 1 + int(lg(u) / lq)
        if g >= total_pairs:
            break
        while g >= row_start + (n - 1 - row):
            row_start += n - 1 - row
            row += 1
        us.append(row)
        vs.append(row + 1 + (g - row_start))
    return (np.array(us, dtype=np.int64), np.array(vs, dtype=np.int64), pos)
