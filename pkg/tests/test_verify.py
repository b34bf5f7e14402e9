"""Gate registry plumbing; the gates themselves run in the acceptance
module."""

import pytest

from crglimits import verify
from crglimits.dist import ParameterError


def test_every_gate_is_callable():
    for name, fn in verify.GATES.items():
        assert callable(fn), name


def test_suites_reference_real_gates():
    for suite, members in verify.SUITES.items():
        assert members, suite
        for m in members:
            assert m in verify.GATES, (suite, m)


def test_all_suite_covers_everything():
    assert set(verify.SUITES["all"]) == set(verify.GATES)


def test_gate_names_expansion():
    got = verify.gate_names(["crt"])
    assert got == ["crt-root", "crt-lengths"]
    # direct gate names pass through; duplicates collapse
    got = verify.gate_names(["crt-root", "crt", "crt-root"])
    assert got == ["crt-root", "crt-lengths"]
    with pytest.raises(ParameterError):
        verify.gate_names(["nope"])


def test_run_gates_stamps_seed_and_names():
    reports = verify.run_gates(["quotient-metric"], seed=123)
    assert reports
    for r in reports:
        assert r.seed == 123
        assert r.test == "quotient-metric-oracle"
        assert r.passed


def test_gates_are_order_insensitive():
    a = verify.run_gates(["quotient-metric", "identities"], 7)
    b = verify.run_gates(["identities", "quotient-metric"], 7)
    assert sorted(map(tuple, a)) == sorted(map(tuple, b))
