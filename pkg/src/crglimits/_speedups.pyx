# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels.

Twin of crglimits._pykernels: same draw sequences, same libm calls, bit
identical outputs.  See that module for the algorithm notes.
"""

import numpy as np

from libc.math cimport cos, log, log1p, pow, sqrt
from libc.stdint cimport int64_t, uint64_t

name = "compiled"

cdef uint64_t GAMMA_C = 0x9E3779B97F4A7C15
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9
cdef uint64_t MIX_B = 0x94D049BB133111EB
cdef double TWO_NEG53 = 1.0 / 9007199254740992.0
cdef double TWO_PI = 6.283185307179586


cdef inline uint64_t _mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * MIX_A
    z = (z ^ (z >> 27)) * MIX_B
    return z ^ (z >> 31)


cdef inline double _unif(uint64_t *pos) nogil:
    pos[0] = pos[0] + GAMMA_C
    return (<double>(_mix64(pos[0]) >> 11) + 0.5) * TWO_NEG53


cdef inline double _normal(uint64_t *pos) nogil:
    cdef double u1 = _unif(pos)
    cdef double u2 = _unif(pos)
    return sqrt(-2.0 * log(u1)) * cos(TWO_PI * u2)


cdef double _gamma(uint64_t *pos, double shape, double rate) nogil:
    cdef double d, c, x, t, v, u, x2
    if shape < 1.0:
        x = _gamma(pos, shape + 1.0, rate)
        u = _unif(pos)
        return x * pow(u, 1.0 / shape)
    d = shape - 1.0 / 3.0
    c = 1.0 / sqrt(9.0 * d)
    while True:
        x = _normal(pos)
        t = 1.0 + c * x
        if t <= 0.0:
            continue
        v = t * t * t
        u = _unif(pos)
        x2 = x * x
        if u < 1.0 - 0.0331 * x2 * x2:
            return d * v / rate
        if log(u) < 0.5 * x2 + d * (1.0 - v + log(v)):
            return d * v / rate


cdef inline double _gap(uint64_t *pos, double c) nogil:
    cdef double u = _unif(pos)
    return sqrt(c * c - 2.0 * log(u)) - c


def uniform(unsigned long long pos):
    cdef uint64_t p = pos
    cdef double u = _unif(&p)
    return u, int(p)


def uniform_array(unsigned long long pos, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _unif(&p)
    return out, int(p)


def exponential(unsigned long long pos, double rate):
    cdef uint64_t p = pos
    cdef double u = _unif(&p)
    return -(log(u) / rate), int(p)


def exponential_array(unsigned long long pos, double rate, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = -(log(_unif(&p)) / rate)
    return out, int(p)


def rayleigh(unsigned long long pos):
    cdef uint64_t p = pos
    cdef double u = _unif(&p)
    return sqrt(-2.0 * log(u)), int(p)


def rayleigh_array(unsigned long long pos, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = sqrt(-2.0 * log(_unif(&p)))
    return out, int(p)


def poisson_gap(unsigned long long pos, double c):
    cdef uint64_t p = pos
    cdef double g = _gap(&p, c)
    return g, int(p)


def gap_array(unsigned long long pos, double c, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _gap(&p, c)
    return out, int(p)


def normal(unsigned long long pos):
    cdef uint64_t p = pos
    cdef double x = _normal(&p)
    return x, int(p)


def normal_array(unsigned long long pos, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _normal(&p)
    return out, int(p)


def gamma(unsigned long long pos, double shape, double rate):
    cdef uint64_t p = pos
    cdef double x = _gamma(&p, shape, rate)
    return x, int(p)


def gamma_array(unsigned long long pos, double shape, double rate, Py_ssize_t n):
    out = np.empty(n)
    cdef double[::1] o = out
    cdef uint64_t p = pos
    cdef Py_ssize_t i
    for i in range(n):
        o[i] = _gamma(&p, shape, rate)
    return out, int(p)


def stick_break_engine(unsigned long long pos, Py_ssize_t n_segments, bint fresh,
                       edge_u, edge_v, edge_len, edge_color, color_totals,
                       Py_ssize_t n_vertices, bint want_trace):
    cdef Py_ssize_t n0 = len(edge_u)
    cdef Py_ssize_t cap = n0 + 2 * n_segments + 1
    eu_arr = np.empty(cap, dtype=np.int64)
    ev_arr = np.empty(cap, dtype=np.int64)
    el_arr = np.empty(cap)
    ec_arr = np.empty(cap, dtype=np.int64)
    eu_arr[:n0] = edge_u
    ev_arr[:n0] = edge_v
    el_arr[:n0] = edge_len
    ec_arr[:n0] = edge_color
    cdef int64_t[::1] eu = eu_arr
    cdef int64_t[::1] ev = ev_arr
    cdef double[::1] el = el_arr
    cdef int64_t[::1] ec = ec_arr

    cdef Py_ssize_t n_colors
    if fresh and n_segments > 0:
        totals_arr = np.zeros(1)
        n_colors = 1
    elif fresh:
        totals_arr = np.empty(0)
        n_colors = 0
    else:
        totals_arr = np.array(color_totals, dtype=np.float64)
        n_colors = totals_arr.shape[0]
    cdef double[::1] totals = totals_arr

    leaves_arr = np.empty(n_segments, dtype=np.int64)
    cdef int64_t[::1] leaves = leaves_arr
    tc_arr = np.empty(n_segments if want_trace else 0, dtype=np.int64)
    tg_arr = np.empty(n_segments if want_trace else 0)
    cdef int64_t[::1] tc = tc_arr
    cdef double[::1] tg = tg_arr

    cdef uint64_t p = pos
    cdef Py_ssize_t n_edges = n0
    cdef Py_ssize_t n_leaves = 0
    cdef Py_ssize_t n_trace = 0
    cdef Py_ssize_t nv = n_vertices
    cdef Py_ssize_t steps = n_segments
    cdef double grand = 0.0
    cdef Py_ssize_t i, ei, color, chosen, last, sidx
    cdef double j1, u, target, before, local, acc, nxt, offset, g
    cdef Py_ssize_t w, attach, leaf

    if not fresh:
        for i in range(n_colors):
            grand += totals[i]
    else:
        if n_segments > 0:
            u = _unif(&p)
            j1 = sqrt(-2.0 * log(u))
            eu[0] = 0
            ev[0] = 1
            el[0] = j1
            ec[0] = 0
            n_edges = 1
            totals[0] = j1
            grand = j1
            nv = 2
            leaves[0] = 1
            n_leaves = 1
            steps = n_segments - 1
        else:
            nv = 1
            steps = 0

    for sidx in range(steps):
        u = _unif(&p)
        target = u * grand
        # select color by cumulative totals, clamp to last
        color = n_colors - 1
        before = 0.0
        acc = 0.0
        for i in range(n_colors):
            nxt = acc + totals[i]
            if target <= nxt:
                color = i
                before = acc
                break
            acc = nxt
        else:
            before = acc - totals[n_colors - 1]
        local = target - before
        # locate edge within the color group, insertion order
        chosen = -1
        last = -1
        acc = 0.0
        offset = 0.0
        for ei in range(n_edges):
            if ec[ei] != color:
                continue
            last = ei
            nxt = acc + el[ei]
            if local <= nxt:
                chosen = ei
                offset = local - acc
                break
            acc = nxt
        if chosen < 0:
            chosen = last
            offset = el[chosen]
        g = _gap(&p, grand)
        if offset >= el[chosen]:
            attach = ev[chosen]
        else:
            w = nv
            nv += 1
            eu[n_edges] = w
            ev[n_edges] = ev[chosen]
            el[n_edges] = el[chosen] - offset
            ec[n_edges] = color
            n_edges += 1
            ev[chosen] = w
            el[chosen] = offset
            attach = w
        leaf = nv
        nv += 1
        eu[n_edges] = attach
        ev[n_edges] = leaf
        el[n_edges] = g
        ec[n_edges] = color
        n_edges += 1
        leaves[n_leaves] = leaf
        n_leaves += 1
        totals[color] += g
        grand += g
        if want_trace:
            tc[n_trace] = color
            tg[n_trace] = g
            n_trace += 1

    return (eu_arr[:n_edges].copy(), ev_arr[:n_edges].copy(),
            el_arr[:n_edges].copy(), ec_arr[:n_edges].copy(),
            int(nv), leaves_arr[:n_leaves].copy(),
            tc_arr[:n_trace].copy(), tg_arr[:n_trace].copy(),
            totals_arr[:n_colors].copy(), int(p))


def urn_engine(unsigned long long pos, lengths0, Py_ssize_t n_steps):
    cdef Py_ssize_t m = len(lengths0)
    L_arr = np.array(lengths0, dtype=np.float64).copy()
    cdef double[::1] L = L_arr
    L_traj = np.empty((n_steps + 1, m))
    N_traj = np.empty((n_steps + 1, m), dtype=np.int64)
    picks_arr = np.empty(n_steps, dtype=np.int64)
    gaps_arr = np.empty(n_steps)
    cdef double[:, ::1] Lt = L_traj
    cdef int64_t[:, ::1] Nt = N_traj
    cdef int64_t[::1] picks = picks_arr
    cdef double[::1] gaps = gaps_arr

    N_arr = np.ones(m, dtype=np.int64)
    cdef int64_t[::1] N = N_arr
    cdef uint64_t p = pos
    cdef double C = 0.0
    cdef Py_ssize_t i, s, idx
    cdef double u, target, acc, nxt, g
    for i in range(m):
        C += L[i]
        Lt[0, i] = L[i]
        Nt[0, i] = 1
    for s in range(n_steps):
        u = _unif(&p)
        target = u * C
        idx = m - 1
        acc = 0.0
        for i in range(m):
            nxt = acc + L[i]
            if target <= nxt:
                idx = i
                break
            acc = nxt
        g = _gap(&p, C)
        L[idx] += g
        C += g
        N[idx] += 2
        picks[s] = idx
        gaps[s] = g
        for i in range(m):
            Lt[s + 1, i] = L[i]
            Nt[s + 1, i] = N[i]
    return L_traj, N_traj, picks_arr, gaps_arr, int(p)


def urn_bulk_engine(states, lengths0, Py_ssize_t n_steps):
    st_arr = np.array(states, dtype=np.uint64).copy()
    L_arr = np.array(lengths0, dtype=np.float64).copy()
    cdef uint64_t[::1] st = st_arr
    cdef double[:, ::1] L = L_arr
    cdef Py_ssize_t n_trials = L_arr.shape[0]
    cdef Py_ssize_t m = L_arr.shape[1]
    N_arr = np.ones((n_trials, m), dtype=np.int64)
    cdef int64_t[:, ::1] N = N_arr
    cdef Py_ssize_t t, s, i, idx
    cdef uint64_t p
    cdef double C, u, target, acc, nxt, g
    for t in range(n_trials):
        p = st[t]
        C = 0.0
        for i in range(m):
            C += L[t, i]
        for s in range(n_steps):
            u = _unif(&p)
            target = u * C
            idx = m - 1
            acc = 0.0
            for i in range(m):
                nxt = acc + L[t, i]
                if target <= nxt:
                    idx = i
                    break
                acc = nxt
            g = _gap(&p, C)
            L[t, idx] += g
            C += g
            N[t, idx] += 2
        st[t] = p
    return L_arr, N_arr, st_arr


def polya_bulk_engine(states, counts0, Py_ssize_t n_steps):
    st_arr = np.array(states, dtype=np.uint64).copy()
    C_arr = np.array(counts0, dtype=np.float64)
    cdef uint64_t[::1] st = st_arr
    cdef double[:, ::1] cnt = C_arr
    cdef Py_ssize_t n_trials = C_arr.shape[0]
    cdef Py_ssize_t m = C_arr.shape[1]
    cdef Py_ssize_t t, s, i, idx
    cdef uint64_t p
    cdef double total, u, target, acc, nxt
    for t in range(n_trials):
        p = st[t]
        total = 0.0
        for i in range(m):
            total += cnt[t, i]
        for s in range(n_steps):
            u = _unif(&p)
            target = u * total
            idx = m - 1
            acc = 0.0
            for i in range(m):
                nxt = acc + cnt[t, i]
                if target <= nxt:
                    idx = i
                    break
                acc = nxt
            cnt[t, idx] += 2.0
            total += 2.0
        st[t] = p
    return C_arr.astype(np.int64), st_arr


def gnp_edges_engine(unsigned long long pos, Py_ssize_t n, double p_edge):
    cdef double lq = log1p(-p_edge)
    cdef int64_t total_pairs = (<int64_t>n) * (n - 1) // 2
    # expected edges + slack; grown geometrically if exceeded
    cdef Py_ssize_t cap = <Py_ssize_t>(total_pairs * p_edge + 10.0 * sqrt(total_pairs * p_edge + 1.0) + 64.0)
    us_arr = np.empty(cap, dtype=np.int64)
    vs_arr = np.empty(cap, dtype=np.int64)
    cdef int64_t[::1] us = us_arr
    cdef int64_t[::1] vs = vs_arr
    cdef uint64_t p = pos
    cdef int64_t g = -1
    cdef int64_t row = 0
    cdef int64_t row_start = 0
    cdef Py_ssize_t cnt = 0
    cdef double u
    while True:
        u = _unif(&p)
        g += 1 + <int64_t>(log(u) / lq)
        if g >= total_pairs:
            break
        while g >= row_start + (n - 1 - row):
            row_start += n - 1 - row
            row += 1
        if cnt == cap:
            cap = cap * 2
            us_arr = np.concatenate([us_arr, np.empty(cap - cnt, dtype=np.int64)])
            vs_arr = np.concatenate([vs_arr, np.empty(cap - cnt, dtype=np.int64)])
            us = us_arr
            vs = vs_arr
        us[cnt] = row
        vs[cnt] = row + 1 + (g - row_start)
        cnt += 1
    return us_arr[:cnt].copy(), vs_arr[:cnt].copy(), int(p)
