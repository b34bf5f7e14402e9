"""Distribution sampler laws, checked against scipy's reference CDFs."""

import math

import numpy as np
import pytest
import scipy.stats

from crglimits.dist import (ParameterError, SimplexVector, duplication_pmf,
                            sample_dirichlet, sample_dirichlet_many,
                            sample_duplication_index, sample_exponential,
                            sample_gamma, sample_gamma_many, sample_rayleigh,
                            sample_rayleigh_many, size_biased_index)
from crglimits.rng import RngStream

N = 20000
D_BAND = 0.02  # loose band fit for 2e4 draws; the seeded gates run tighter


def _ks(sample, dist) -> float:
    return scipy.stats.kstest(np.asarray(sample), dist.cdf).statistic


def test_gamma_law_across_shapes():
    for shape, rate in ((0.5, 0.5), (1.0, 1.0), (2.0, 0.5), (6.0, 0.5),
                        (0.3, 2.0)):
        s = RngStream(101).child(f"g-{shape}-{rate}")
        x = sample_gamma_many(s, shape, rate, N)
        assert _ks(x, scipy.stats.gamma(shape, scale=1.0 / rate)) < D_BAND


def test_gamma_scalar_matches_array():
    a = RngStream(5)
    b = RngStream(5)
    arr = sample_gamma_many(a, 2.5, 0.5, 30)
    singles = [sample_gamma(b, 2.5, 0.5) for _ in range(30)]
    assert np.array_equal(arr, np.array(singles))


def test_exponential_law():
    s = RngStream(102)
    x = [sample_exponential(s, 0.5) for _ in range(N)]
    assert _ks(x, scipy.stats.expon(scale=2.0)) < D_BAND


def test_rayleigh_law():
    s = RngStream(103)
    x = sample_rayleigh_many(s, N)
    assert _ks(x, scipy.stats.rayleigh()) < D_BAND


def test_rayleigh_scalar_matches_array():
    a = RngStream(6)
    b = RngStream(6)
    arr = sample_rayleigh_many(a, 30)
    singles = [sample_rayleigh(b) for _ in range(30)]
    assert np.array_equal(arr, np.array(singles))


def test_rayleigh_squared_is_gamma_half_rate():
    # X ~ Rayleigh -> X^2 ~ Exp(1/2) = Gamma(1, 1/2)
    s = RngStream(104)
    x = sample_rayleigh_many(s, N) ** 2
    assert _ks(x, scipy.stats.gamma(1.0, scale=2.0)) < D_BAND


def test_dirichlet_marginals_and_simplex():
    s = RngStream(105)
    rows = sample_dirichlet_many(s, (1.0, 1.0, 1.0), N)
    assert np.allclose(rows.sum(axis=1), 1.0, atol=1e-12)
    # uniform Dirichlet marginal is Beta(1, m-1)
    for j in range(3):
        assert _ks(rows[:, j], scipy.stats.beta(1.0, 2.0)) < D_BAND
    half = sample_dirichlet_many(RngStream(106), (0.5, 0.5, 0.5), N)
    for j in range(3):
        assert _ks(half[:, j], scipy.stats.beta(0.5, 1.0)) < D_BAND


def test_dirichlet_scalar_matches_many():
    a = RngStream(7)
    b = RngStream(7)
    rows = sample_dirichlet_many(a, (0.5, 1.5), 10)
    singles = [sample_dirichlet(b, (0.5, 1.5)) for _ in range(10)]
    assert np.allclose(rows, np.array(singles), atol=0, rtol=0)


def test_simplex_vector_validates():
    v = SimplexVector((0.25, 0.75))
    assert math.isclose(sum(v), 1.0)
    with pytest.raises(ParameterError):
        SimplexVector((0.5, 0.6))
    with pytest.raises(ParameterError):
        SimplexVector((-0.1, 1.1))


def test_size_biased_index_frequencies():
    p = (0.1, 0.2, 0.7)
    s = RngStream(107)
    counts = [0, 0, 0]
    for _ in range(N):
        counts[size_biased_index(s, p)] += 1
    for j in range(3):
        assert abs(counts[j] / N - p[j]) < 0.01


def test_size_biased_accepts_unnormalized_weights():
    s = RngStream(108)
    a = [size_biased_index(s.clone(), (1.0, 3.0)) for _ in range(200)]
    b = [size_biased_index(s.clone(), (0.25, 0.75)) for _ in range(200)]
    assert a == b


def test_gamma_rejects_bad_params():
    s = RngStream(1)
    for shape, rate in ((0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (1.0, -2.0)):
        with pytest.raises(ParameterError):
            sample_gamma(s, shape, rate)


def test_duplication_pmf_shape():
    for r, s_ in ((0.5, 2), (1.0, 2), (1.0, 3), (2.5, 2)):
        p = duplication_pmf(r, s_)
        assert len(p) == s_
        assert np.all(p > 0)
        assert math.isclose(float(p.sum()), 1.0, abs_tol=1e-12)


def test_duplication_pmf_classical_values():
    # s=2: splitting Gamma(2r) into two Gamma(r + j/2) factors weights
    # the offsets by a ratio of Gamma functions; at r=1/2 the two cells
    # are (1/2, 1/2) by symmetry of the construction
    p = duplication_pmf(0.5, 2)
    assert np.allclose(p, [0.5, 0.5], atol=1e-12)


def test_duplication_index_frequencies():
    # the sampled index J is 1-based, living in {1, ..., s}
    r, s_ = 1.0, 3
    pmf = duplication_pmf(r, s_)
    st = RngStream(109)
    counts = np.zeros(s_)
    for _ in range(N):
        j = sample_duplication_index(st, r, s_)
        assert 1 <= j <= s_
        counts[j - 1] += 1
    assert np.max(np.abs(counts / N - pmf)) < 0.01
