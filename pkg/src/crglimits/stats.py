"""Goodness-of-fit machinery: KS and chi-square statistics plus the CDF
helpers the verification gates compare against.

Statistics are plain numbers; pass/fail lives in TestReport, which pairs
a statistic with a fixed threshold (pass means statistic <= threshold).
Thresholds are baked constants rather than p-values so a fixed seed
gives a deterministic verdict.
"""

from __future__ import annotations

import json
import math
from typing import Callable, List, NamedTuple, Sequence

import numpy as np
from scipy import special

from .dist import ParameterError

__all__ = [
    "TestReport",
    "make_report",
    "reports_to_json",
    "ks_one_sample",
    "ks_two_sample",
    "chi_square",
    "cdf_uniform",
    "cdf_rayleigh",
    "cdf_half_normal",
    "cdf_exponential",
    "cdf_gamma",
    "cdf_beta",
]


class TestReport(NamedTuple):
    test: str
    n: int
    statistic: float
    threshold: float
    passed: bool
    seed: int


def make_report(test: str, n: int, statistic: float, threshold: float,
                seed: int) -> TestReport:
    return TestReport(test, int(n), float(statistic), float(threshold),
                      bool(statistic <= threshold), int(seed))


def reports_to_json(reports: Sequence[TestReport]) -> str:
    """Stable JSON array; key order fixed, no timestamps, so identical
    runs serialize byte-identically."""
    rows = [{"test": r.test, "n": r.n, "statistic": r.statistic,
             "threshold": r.threshold, "pass": r.passed, "seed": r.seed}
            for r in reports]
    return json.dumps(rows, indent=2)


def _as_sorted_array(sample) -> np.ndarray:
    arr = np.asarray(sample, dtype=np.float64)
    if arr.ndim != 1 or len(arr) == 0:
        raise ParameterError("sample must be a nonempty 1-d sequence")
    return np.sort(arr)


def ks_one_sample(sample: Sequence[float],
                  cdf: Callable[[float], float]) -> float:
    """sup |ECDF - CDF| over the sample points, both one-sided gaps."""
    xs = _as_sorted_array(sample)
    n = len(xs)
    try:
        f = np.asarray(cdf(xs), dtype=np.float64)
        if f.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([cdf(float(x)) for x in xs], dtype=np.float64)
    steps = np.arange(1, n + 1, dtype=np.float64) / n
    d_plus = float(np.max(steps - f))
    d_minus = float(np.max(f - (steps - 1.0 / n)))
    return max(d_plus, d_minus)


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """sup |ECDF_a - ECDF_b|."""
    xa = _as_sorted_array(a)
    xb = _as_sorted_array(b)
    post = np.concatenate([xa, xb])
    ca = np.searchsorted(xa, post, side="right") / len(xa)
    cb = np.searchsorted(xb, post, side="right") / len(xb)
    return float(np.max(np.abs(ca - cb)))


def chi_square(observed: Sequence[int],
               expected_probs: Sequence[float]) -> float:
    """Pearson statistic with adjacent-bin pooling.

    Bins are merged left to right until each pooled expected count is at
    least 5 (a trailing light group joins its predecessor), then
    sum (O-E)^2 / E over the pooled bins.
    """
    obs = [int(x) for x in observed]
    probs = [float(p) for p in expected_probs]
    if len(obs) != len(probs) or not obs:
        raise ParameterError("observed and expected_probs must have equal "
                             "nonzero length")
    if any(x < 0 for x in obs):
        raise ParameterError("counts must be nonnegative")
    total = sum(obs)
    if total <= 0:
        raise ParameterError("need at least one observation")
    if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > 1e-9:
        raise ParameterError("expected_probs must be a probability vector")
    pooled = []  # (observed, expected) pairs
    acc_o, acc_e = 0, 0.0
    for o, p in zip(obs, probs):
        acc_o += o
        acc_e += total * p
        if acc_e >= 5.0:
            pooled.append((acc_o, acc_e))
            acc_o, acc_e = 0, 0.0
    if acc_e > 0.0 or acc_o > 0:
        if pooled:
            lo, le = pooled.pop()
            pooled.append((lo + acc_o, le + acc_e))
        else:
            raise ParameterError("expected vector too light to form a bin")
    if len(pooled) < 2:
        raise ParameterError("fewer than two bins after pooling")
    return math.fsum((o - e) ** 2 / e for o, e in pooled)


# CDFs used by the gates.  Gamma and beta go through the regularized
# incomplete functions, which scipy evaluates well past the 1e-10
# relative accuracy the reports rely on.

def cdf_uniform(x, lo: float = 0.0, hi: float = 1.0):
    if not hi > lo:
        raise ParameterError("need hi > lo")
    return np.clip((np.asarray(x, dtype=np.float64) - lo) / (hi - lo),
                   0.0, 1.0)


def cdf_rayleigh(x):
    xs = np.asarray(x, dtype=np.float64)
    return np.where(xs > 0.0, -np.expm1(-0.5 * xs * xs), 0.0)


def cdf_half_normal(x):
    xs = np.asarray(x, dtype=np.float64)
    return np.where(xs > 0.0, special.erf(xs / math.sqrt(2.0)), 0.0)


def cdf_exponential(x, rate: float = 1.0):
    if rate <= 0.0:
        raise ParameterError("rate must be positive")
    xs = np.asarray(x, dtype=np.float64)
    return np.where(xs > 0.0, -np.expm1(-rate * xs), 0.0)


def cdf_gamma(x, shape: float, rate: float):
    if shape <= 0.0 or rate <= 0.0:
        raise ParameterError("shape and rate must be positive")
    xs = np.asarray(x, dtype=np.float64)
    return special.gammainc(shape, rate * np.maximum(xs, 0.0))


def cdf_beta(x, a: float, b: float):
    if a <= 0.0 or b <= 0.0:
        raise ParameterError("beta parameters must be positive")
    xs = np.clip(np.asarray(x, dtype=np.float64), 0.0, 1.0)
    return special.betainc(a, b, xs)
