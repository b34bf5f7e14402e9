"""Pure and compiled kernels must be bit-identical, not just close."""

import numpy as np
import pytest

from crglimits import _pykernels
from crglimits.rng import RngStream

try:
    from crglimits import _speedups
except ImportError:
    _speedups = None

needs_ext = pytest.mark.skipif(_speedups is None,
                               reason="compiled extension not built")

POS = RngStream(2024)._pos


def _pair(fn_name, *args):
    pure = getattr(_pykernels, fn_name)(POS, *args)
    comp = getattr(_speedups, fn_name)(POS, *args)
    return pure, comp


@needs_ext
def test_names_differ():
    assert _pykernels.name == "pure"
    assert _speedups.name == "compiled"


@needs_ext
@pytest.mark.parametrize("fn,args", [
    ("uniform", ()),
    ("exponential", (0.7,)),
    ("rayleigh", ()),
    ("poisson_gap", (1.3,)),
    ("normal", ()),
    ("gamma", (0.5, 0.5)),
    ("gamma", (1.0, 2.0)),
    ("gamma", (3.5, 0.5)),
])
def test_scalar_kernels_bitwise(fn, args):
    (pv, pp), (cv, cp) = _pair(fn, *args)
    assert pv == cv
    assert pp == cp


@needs_ext
@pytest.mark.parametrize("fn,args", [
    ("uniform_array", (257,)),
    ("exponential_array", (0.7, 257)),
    ("rayleigh_array", (257,)),
    ("gap_array", (1.3, 257)),
    ("normal_array", (257,)),
    ("gamma_array", (0.5, 0.5, 257)),
    ("gamma_array", (4.25, 0.5, 257)),
])
def test_array_kernels_bitwise(fn, args):
    (pv, pp), (cv, cp) = _pair(fn, *args)
    assert pp == cp
    assert np.array_equal(np.asarray(pv), np.asarray(cv))


@needs_ext
def test_array_matches_scalar_loop():
    vals, pos = _pykernels.gamma_array(POS, 2.5, 0.5, 40)
    p = POS
    singles = []
    for _ in range(40):
        v, p = _pykernels.gamma(p, 2.5, 0.5)
        singles.append(v)
    assert pos == p
    assert np.array_equal(np.asarray(vals), np.asarray(singles))


@needs_ext
def test_stick_break_engine_bitwise():
    args = (POS, 9, 1, [], [], [], [], [], 1, 1)
    pure = _pykernels.stick_break_engine(*args)
    comp = _speedups.stick_break_engine(*args)
    for a, b in zip(pure, comp):
        assert np.array_equal(np.asarray(a, dtype=object).tolist(),
                              np.asarray(b, dtype=object).tolist())


@needs_ext
def test_urn_engine_bitwise():
    lengths0 = [0.4, 1.1, 0.25]
    pL, pN, ppk, pg, ppos = _pykernels.urn_engine(POS, lengths0, 25)
    cL, cN, cpk, cg, cpos = _speedups.urn_engine(POS, lengths0, 25)
    assert ppos == cpos
    assert np.array_equal(np.asarray(pL), np.asarray(cL))
    assert np.array_equal(np.asarray(pN), np.asarray(cN))
    assert np.array_equal(np.asarray(ppk), np.asarray(cpk))
    assert np.array_equal(np.asarray(pg), np.asarray(cg))


@needs_ext
def test_bulk_engines_bitwise():
    states = np.array([RngStream(3).child(f"urn-{i}")._pos
                       for i in range(6)], dtype=np.uint64)
    lengths0 = np.abs(np.sin(np.arange(18, dtype=np.float64) + 1.0)
                      ).reshape(6, 3) + 0.05
    p = _pykernels.urn_bulk_engine(states, lengths0, 30)
    c = _speedups.urn_bulk_engine(states, lengths0, 30)
    for a, b in zip(p, c):
        assert np.array_equal(np.asarray(a), np.asarray(b))
    counts0 = np.ones((6, 3), dtype=np.int64)
    p = _pykernels.polya_bulk_engine(states, counts0, 30)
    c = _speedups.polya_bulk_engine(states, counts0, 30)
    assert np.array_equal(np.asarray(p[0]), np.asarray(c[0]))


@needs_ext
def test_gnp_engine_bitwise():
    pu, pv, ppos = _pykernels.gnp_edges_engine(POS, 300, 0.004)
    cu, cv, cpos = _speedups.gnp_edges_engine(POS, 300, 0.004)
    assert ppos == cpos
    assert np.array_equal(np.asarray(pu), np.asarray(cu))
    assert np.array_equal(np.asarray(pv), np.asarray(cv))
