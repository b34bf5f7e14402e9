"""Acceptance suite: every distributional claim the library makes, run
end to end at the canonical seed with its shipped tolerance.

Each criterion prints one PASS/FAIL line per report.  Gate results are
cached so shared gates run once per session.

Known failure: the finite-n unicyclic check (criterion 13, first half)
asks for KS D < 0.06 against the half-normal at n = 50000.  Cycle
lengths of simple graphs are at least 3, so the rescaled sample has no
mass below 3 * n^(-1/3) / sigma; integrating the half-normal over that
gap already costs D ~ 0.062 in the large-sample limit, which simulation
of the exact conditioned law confirms (the band opens up from roughly
n = 2 * 10^5).  The check runs as stated and reports the honest number
rather than a loosened one.
"""

import time

import pytest

from crglimits import verify

SEED = 42

_cache = {}


def _gate(name):
    got = _cache.get(name)
    if got is None:
        t0 = time.perf_counter()
        reports = verify.run_gates([name], SEED)
        got = (reports, time.perf_counter() - t0)
        _cache[name] = got
    return got


def _require(gate, names=None):
    reports, elapsed = _gate(gate)
    if names is not None:
        reports = [r for r in reports if r.test in names]
        assert len(reports) == len(names)
    for r in reports:
        status = "PASS" if r.passed else "FAIL"
        print(f"{status} {r.test}: statistic={r.statistic:.6g} "
              f"threshold={r.threshold:.6g} n={r.n} seed={r.seed} "
              f"[gate {elapsed:.1f}s]")
    bad = [r for r in reports if not r.passed]
    assert not bad, "; ".join(
        f"{r.test} statistic {r.statistic:.6g} > threshold {r.threshold:.6g}"
        for r in bad)


def test_criterion_01_root_distance_is_rayleigh():
    _require("crt-root")


def test_criterion_02_stick_total_squared_is_gamma():
    _require("crt-lengths")


def test_criterion_03_unicyclic_cycle_is_half_normal():
    _require("unicyclic-cycle")


def test_criterion_04_lollipop_joint_law():
    _require("lollipop")


def test_criterion_05_core_totals_and_proportions():
    _require("core-lengths")


def test_criterion_06_kernel_enumeration_and_frequencies():
    _require("kernel-law")


def test_criterion_07_rayleigh_dirichlet_identity():
    _require("rayleigh-dirichlet")


def test_criterion_08_cross_procedure_equivalence():
    _require("cross-procedure")


def test_criterion_09_urn_total_length_law():
    _require("urn-totals")


def test_criterion_10_polya_and_proportion_limits():
    _require("polya-limit")


def test_criterion_11_per_color_first_gap():
    _require("urn-poisson")


def test_criterion_12_duplication_identities():
    _require("duplication")


def test_criterion_13a_finite_unicyclic_band():
    # expected to fail at n = 50000: see the module docstring; the
    # statistic lands at its structural floor just above the band
    _require("finite-window", names=["finite-unicyclic-cycle"])


def test_criterion_13b_finite_kernel_frequencies():
    _require("finite-window", names=["finite-kernel-frequency"])


def test_criterion_14_quotient_metric_oracle():
    _require("quotient-metric")
