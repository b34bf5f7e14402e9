"""Base distributions and the simplex type.

Every sampler takes an explicit RngStream and advances it; nothing here
keeps hidden state.  Bulk variants return numpy arrays and consume the
stream exactly as the scalar versions would, one trial after another.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from . import backend
from .rng import RngStream

__all__ = [
    "ParameterError",
    "SimplexVector",
    "sample_gamma",
    "sample_gamma_many",
    "sample_dirichlet",
    "sample_dirichlet_many",
    "sample_rayleigh",
    "sample_rayleigh_many",
    "sample_exponential",
    "size_biased_index",
    "duplication_pmf",
    "sample_duplication_index",
]

SIMPLEX_TOL = 1e-12


class ParameterError(ValueError):
    """A sampler was called with parameters outside its domain."""


class SimplexVector(tuple):
    """Strictly positive coordinates summing to one.

    Construction renormalizes, so accumulated float drift in long runs
    cannot push a vector off the simplex; inputs more than SIMPLEX_TOL
    away from sum 1 are rejected as genuinely wrong rather than drifted.
    """

    def __new__(cls, coordinates: Sequence[float]):
        coords = [float(c) for c in coordinates]
        if not coords:
            raise ParameterError("simplex vector needs at least one coordinate")
        if any(c <= 0.0 for c in coords):
            raise ParameterError("simplex coordinates must be strictly positive")
        total = math.fsum(coords)
        if abs(total - 1.0) > SIMPLEX_TOL:
            raise ParameterError(f"coordinates sum to {total!r}, not 1")
        return super().__new__(cls, (c / total for c in coords))

    @classmethod
    def normalize(cls, weights: Sequence[float]) -> "SimplexVector":
        """Build from unnormalized positive weights."""
        w = [float(x) for x in weights]
        total = math.fsum(w)
        if total <= 0.0 or any(x <= 0.0 for x in w):
            raise ParameterError("weights must be strictly positive")
        return cls([x / total for x in w])


def _check_gamma_params(shape: float, rate: float) -> None:
    if not (shape > 0.0) or not (rate > 0.0):
        raise ParameterError(f"gamma needs shape > 0 and rate > 0, "
                             f"got shape={shape}, rate={rate}")


def sample_gamma(stream: RngStream, shape: float, rate: float) -> float:
    """One Gamma(shape, rate) draw; shape=1 reduces to Exp(rate)."""
    _check_gamma_params(shape, rate)
    x, stream._pos = backend.impl.gamma(stream._pos, shape, rate)
    return x


def sample_gamma_many(stream: RngStream, shape: float, rate: float,
                      n: int) -> np.ndarray:
    _check_gamma_params(shape, rate)
    out, stream._pos = backend.impl.gamma_array(stream._pos, shape, rate, n)
    return out


def sample_exponential(stream: RngStream, rate: float) -> float:
    if not (rate > 0.0):
        raise ParameterError(f"exponential rate must be positive, got {rate}")
    x, stream._pos = backend.impl.exponential(stream._pos, rate)
    return x


def sample_rayleigh(stream: RngStream) -> float:
    """Draw with survival exp(-s^2/2), the square root of an Exp(1/2)."""
    x, stream._pos = backend.impl.rayleigh(stream._pos)
    return x


def sample_rayleigh_many(stream: RngStream, n: int) -> np.ndarray:
    out, stream._pos = backend.impl.rayleigh_array(stream._pos, n)
    return out


def sample_dirichlet(stream: RngStream, alphas: Sequence[float]) -> SimplexVector:
    """Normalize independent Gamma(alpha_j, 1) draws."""
    a = [float(x) for x in alphas]
    if len(a) < 2:
        raise ParameterError("dirichlet needs at least two alphas")
    if any(x <= 0.0 for x in a):
        raise ParameterError("dirichlet alphas must be strictly positive")
    draws = [sample_gamma(stream, x, 1.0) for x in a]
    return SimplexVector.normalize(draws)


def sample_dirichlet_many(stream: RngStream, alphas: Sequence[float],
                          n: int) -> np.ndarray:
    """n rows, each a Dirichlet(alphas) vector.

    Consumes the stream coordinate-major per trial, matching n calls to
    sample_dirichlet exactly.
    """
    a = [float(x) for x in alphas]
    if len(a) < 2:
        raise ParameterError("dirichlet needs at least two alphas")
    if any(x <= 0.0 for x in a):
        raise ParameterError("dirichlet alphas must be strictly positive")
    out = np.empty((n, len(a)))
    for i in range(n):
        for j, x in enumerate(a):
            out[i, j] = sample_gamma(stream, x, 1.0)
        out[i] /= out[i].sum()
    return out


def size_biased_index(stream: RngStream, p: Sequence[float]) -> int:
    """Index i with probability p_i.

    Walks the cumulative sums against u * total so the same tie-breaking
    applies everywhere a length-biased pick happens.
    """
    u = stream.uniform()
    total = math.fsum(p)
    target = u * total
    acc = 0.0
    for i, w in enumerate(p):
        acc += w
        if target < acc:
            return i
    return len(p) - 1


def duplication_pmf(r: float, s: int) -> np.ndarray:
    """pmf on {1,…,s} of the index appearing in the gamma product identity.

    P(j) = (2s-j-1)! (2r)_{j-1} / [ (s-j)! (j-1)! 2^(2s-j-1) (r+1/2)_{s-1} ]
    evaluated through lgamma for stability; (x)_k denotes the rising
    factorial Γ(x+k)/Γ(x).
    """
    if not (r > 0.0):
        raise ParameterError(f"r must be positive, got {r}")
    if not (isinstance(s, (int, np.integer)) and s >= 1):
        raise ParameterError(f"s must be a positive integer, got {s!r}")
    lg = math.lgamma
    log_denom_pochhammer = lg(r + 0.5 + s - 1) - lg(r + 0.5)
    pmf = np.empty(s)
    for j in range(1, s + 1):
        log_num = (lg(2 * s - j) + (lg(2.0 * r + j - 1) - lg(2.0 * r)))
        log_den = (lg(s - j + 1) + lg(j) + (2 * s - j - 1) * math.log(2.0)
                   + log_denom_pochhammer)
        pmf[j - 1] = math.exp(log_num - log_den)
    total = float(pmf.sum())
    if abs(total - 1.0) > 1e-9:
        raise ParameterError(f"index pmf sums to {total!r} for r={r}, s={s}; "
                             "refusing to sample from it")
    return pmf


def sample_duplication_index(stream: RngStream, r: float, s: int) -> int:
    """Draw J in {1,…,s} from the pmf above."""
    pmf = duplication_pmf(r, s)
    return size_biased_index(stream, pmf) + 1
