"""Limit component samplers: core law, pre-core, both construction
procedures, and the density evaluators with hand-computed values."""

import math

import numpy as np
import pytest
import scipy.stats

from crglimits.dist import ParameterError
from crglimits.limit_sampler import (TreeShape, eval_precore_density,
                                     eval_tilted_fdd_density,
                                     sample_component_p1,
                                     sample_component_p2,
                                     sample_core_lengths,
                                     sample_rooted_precore)
from crglimits.rng import RngStream

D_BAND = 0.025


def _ks(x, dist):
    return scipy.stats.kstest(np.asarray(x), dist.cdf).statistic


def test_core_lengths_frozen_pin():
    c = sample_core_lengths(RngStream(500), 2)
    assert c.surplus == 2
    assert c.lengths == (0.2538550680198653, 0.34373728335425907,
                         0.3728123622477906)
    assert c.total == pytest.approx(0.9704047136219149, abs=0, rel=0)


def test_core_lengths_k1_half_normal():
    s = RngStream(503)
    x = [sample_core_lengths(s, 1).total for _ in range(8000)]
    assert _ks(x, scipy.stats.halfnorm()) < D_BAND


def test_core_lengths_k2_laws():
    s = RngStream(504)
    cores = [sample_core_lengths(s, 2) for _ in range(8000)]
    tot = np.array([c.total for c in cores])
    assert _ks(tot ** 2, scipy.stats.gamma(2.0, scale=2.0)) < D_BAND
    props = np.array([[l / c.total for l in c.lengths] for c in cores])
    for j in range(3):
        assert _ks(props[:, j], scipy.stats.beta(1.0, 2.0)) < D_BAND
    for c in cores[:50]:
        assert math.fsum(c.lengths) == pytest.approx(c.total, rel=1e-12)


def test_core_lengths_counts_and_validation():
    for k in (2, 3, 4):
        c = sample_core_lengths(RngStream(505).child(f"k{k}"), k)
        assert len(c.lengths) == 3 * k - 3
        assert all(l > 0 for l in c.lengths)
    with pytest.raises(ParameterError):
        sample_core_lengths(RngStream(1), 0)


def test_rooted_precore_k1_joint_law():
    s = RngStream(506)
    pre = [sample_rooted_precore(s, 1) for _ in range(8000)]
    g = np.array([p.core.total + p.stem for p in pre])
    assert _ks(g ** 2, scipy.stats.gamma(1.5, scale=2.0)) < D_BAND
    ratio = np.array([p.core.total / (p.core.total + p.stem) for p in pre])
    assert _ks(ratio, scipy.stats.uniform()) < D_BAND


def test_rooted_precore_k2_fields():
    s = RngStream(507)
    for _ in range(200):
        p = sample_rooted_precore(s, 2)
        assert p.stem > 0
        assert 0 <= p.attach_edge < 3
        assert 0.0 <= p.attach_offset <= p.core.lengths[p.attach_edge]


def test_precore_density_hand_values():
    # the joint density depends on the lengths only through their sum
    for lens in ((0.3, 0.7), (0.1, 0.2, 0.3, 0.1, 0.3)):
        s = math.fsum(lens)
        want = s * math.exp(-0.5 * s * s)
        assert eval_precore_density(lens) == pytest.approx(want, rel=1e-12)
    a = eval_precore_density((0.25, 0.75))
    b = eval_precore_density((0.75, 0.25))
    assert a == b  # exchangeable


def test_precore_density_validates():
    with pytest.raises(ParameterError):
        eval_precore_density((0.5,))  # 1 is not 3k-1
    with pytest.raises(ParameterError):
        eval_precore_density((0.1, 0.2, 0.3))  # 3 is not 3k-1
    with pytest.raises(ParameterError):
        eval_precore_density((0.5, -0.1))


def test_tree_shape_construction():
    TreeShape.single_path()
    cherry = TreeShape.cherry()
    assert cherry.k == 2
    TreeShape(3, [(1,), (2,), (3,), (1, 2), (1, 2, 3)])
    with pytest.raises(ParameterError):
        TreeShape(2, [(1,), (2,)])  # missing top
    with pytest.raises(ParameterError):
        TreeShape(3, [(1,), (2,), (3,), (1, 2), (2, 3), (1, 2, 3)])
    with pytest.raises(ParameterError):
        TreeShape(2, [(1,), (1, 2), (1, 2)])  # dup collapses, wrong count


def test_tilted_density_hand_value():
    # cherry with lengths a, b on the leaf segments and c on the trunk:
    # (a+c)(b+c) * total * exp(-total^2/2)
    a, b, c = 0.4, 0.3, 0.2
    total = a + b + c
    want = (a + c) * (b + c) * total * math.exp(-0.5 * total * total)
    got = eval_tilted_fdd_density(TreeShape.cherry(),
                                  {1: a, 2: b, (1, 2): c})
    assert got == pytest.approx(want, rel=1e-12)
    with pytest.raises(ParameterError):
        eval_tilted_fdd_density(TreeShape.cherry(), {1: a, 2: b})
    with pytest.raises(ParameterError):
        eval_tilted_fdd_density(TreeShape.cherry(),
                                {1: a, 2: -b, (1, 2): c})


def test_p2_components_structure():
    comp = sample_component_p2(RngStream(508), 2, 0)
    assert comp.surplus == 2
    assert comp.kernel is not None and comp.kernel.is_three_regular()
    prov = comp.provenance
    assert prov["procedure"] == "p2"
    lens = prov["core_lengths"]
    assert len(lens) == 3
    assert math.fsum(lens) == pytest.approx(prov["core_total"], rel=1e-9)
    # with no added segments the space is exactly the core
    assert comp.space.total_length == pytest.approx(prov["core_total"],
                                                    rel=1e-9)
    grown = sample_component_p2(RngStream(508), 2, 5)
    assert grown.space.total_length > comp.space.total_length


def test_p2_k0_and_k1():
    c0 = sample_component_p2(RngStream(509), 0, 3)
    assert c0.surplus == 0 and c0.kernel is None
    assert c0.space.n_identifications == 0
    c1 = sample_component_p2(RngStream(510), 1, 0)
    assert c1.surplus == 1 and c1.kernel is None
    assert c1.space.n_identifications == 1
    assert c1.provenance["cycle_length"] > 0
    # the one cycle is the whole space when nothing else is grown
    assert c1.space.total_length == pytest.approx(
        c1.provenance["cycle_length"] + c1.provenance["stem"], rel=1e-9)


def test_p2_cycle_law_quick():
    s = RngStream(511)
    x = [sample_component_p2(s.child(f"t{i}"), 1, 0
                             ).provenance["cycle_length"]
         for i in range(4000)]
    assert _ks(x, scipy.stats.halfnorm()) < 0.03
    assert abs(np.mean(x) - math.sqrt(2.0 / math.pi)) < 0.04


def test_p1_components_structure():
    comp = sample_component_p1(RngStream(512), 2, 1)
    assert comp.surplus == 2
    assert comp.kernel is not None and comp.kernel.is_three_regular()
    prov = comp.provenance
    assert prov["procedure"] == "p1"
    lens = prov["kernel_path_lengths"]
    assert len(lens) == 3
    assert all(l > 0 for l in lens)
    # one rescaled tree per kernel edge went in, so the space carries
    # more length than the kernel paths alone
    assert comp.space.total_length > math.fsum(lens) - 1e-12
    # realizing a spanning structure first, only the k cycle-closing
    # edges need a point identification
    assert comp.space.n_identifications == comp.surplus
    with pytest.raises(ParameterError):
        sample_component_p1(RngStream(1), 2, 0)


def test_p1_k0_and_k1():
    c0 = sample_component_p1(RngStream(513), 0, 2)
    assert c0.surplus == 0 and c0.kernel is None
    c1 = sample_component_p1(RngStream(514), 1, 1)
    assert c1.surplus == 1
    assert c1.space.n_identifications == 1
    assert c1.provenance["cycle_length"] > 0


def test_edge_tree_masses_simplex():
    comp = sample_component_p1(RngStream(515), 3, 1)
    masses = comp.edge_tree_masses
    assert masses is not None
    assert len(masses) == 6  # 3k-3 kernel edges at k=3
    assert math.fsum(masses) == pytest.approx(1.0, abs=1e-9)


def test_procedures_are_deterministic():
    a = sample_component_p2(RngStream(516), 2, 3)
    b = sample_component_p2(RngStream(516), 2, 3)
    assert a.space.to_text() == b.space.to_text()
    c = sample_component_p1(RngStream(517), 2, 2)
    d = sample_component_p1(RngStream(517), 2, 2)
    assert c.space.to_text() == d.space.to_text()


def test_cross_procedure_total_core_length_quick():
    # the two constructions target the same law; a light two-sample KS
    # on the total core length separates them if one drifts
    n = 3000
    p1 = np.array([math.fsum(sample_component_p1(
        RngStream(518).child(f"a{i}"), 2, 1
        ).provenance["kernel_path_lengths"]) for i in range(n)])
    p2 = np.array([sample_component_p2(
        RngStream(519).child(f"b{i}"), 2, 0
        ).provenance["core_total"] for i in range(n)])
    assert scipy.stats.ks_2samp(p1, p2, method="asymp").statistic < 0.05


def test_sampler_validates_k():
    with pytest.raises(ParameterError):
        sample_component_p2(RngStream(1), -1, 0)
    with pytest.raises(ParameterError):
        sample_component_p1(RngStream(1), -1, 1)
