from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from distavoid import FSpec, NormSpec, build
from distavoid.errors import ConfigError
from distavoid.norms import eval_norm
from distavoid.oracle import (SamplerConfig, brute_pair_check, contains, exact_density, mc_density, pair_margin,
                              sample_point, sample_points, thickened_lattice_demo)
from distavoid.scale import Scale
from distavoid.tamper import mutation_corpus


def test_contains_examples(worked_1d):
    assert contains(worked_1d, [Fraction(111, 10)])
    assert not contains(worked_1d, [Fraction(23, 2)])
    assert not contains(worked_1d, [0])
    assert contains(worked_1d, [Fraction(-111, 10)]) is False
    with pytest.raises(ConfigError):
        contains(worked_1d, [1, 2])


def brute_contains_1d(m, y):
    for st_ in m.stages:
        a = st_.anchor[0]
        if any(abs(y - c) < st_.ball_radius for c in range(a, a + st_.side + 1)):
            return True
    return False


@given(st.fractions(Fraction(-5), 4000, max_denominator=64))
def test_contains_matches_brute_1d(worked_1d, y):
    assert contains(worked_1d, [y]) == brute_contains_1d(worked_1d, y)


def test_sampled_points_belong(worked_1d, euclid_2d):
    for m in (worked_1d, euclid_2d):
        pts = sample_points(m, SamplerConfig(seed=3, samples=200))
        assert len(pts) == 200
        assert all(contains(m, p) for p in pts)


def test_stage_two_point_is_far(euclid_2d):
    for seed in range(20):
        p = sample_point(euclid_2d, 2, SamplerConfig(seed=seed))
        assert eval_norm(euclid_2d.norm, p) > euclid_2d.stage(1).R.scaled(10)


def test_sampling_is_deterministic(euclid_2d):
    cfg = SamplerConfig(seed=11, samples=50)
    assert sample_points(euclid_2d, cfg) == sample_points(euclid_2d, cfg)
    assert sample_points(euclid_2d, cfg) != sample_points(euclid_2d, replace(cfg, seed=12))
    assert all(contains(euclid_2d, p) for p in sample_points(euclid_2d, replace(cfg, stage=3)))


def test_invalid_stage_and_counts(worked_1d):
    with pytest.raises(ConfigError):
        sample_point(worked_1d, 3)
    with pytest.raises(ConfigError):
        pair_margin(worked_1d, SamplerConfig(samples=0))
    with pytest.raises(ConfigError):
        pair_margin(worked_1d, SamplerConfig(stage=9))
    with pytest.raises(ConfigError):
        mc_density(worked_1d, 1, SamplerConfig(samples=0))


def test_split_partitions_samples():
    parts = SamplerConfig(seed=5, samples=1003, stage=2).split(4)
    assert sum(p.samples for p in parts) == 1003
    assert len({p.seed for p in parts}) == 4 and all(p.stage == 2 for p in parts)
    assert parts == SamplerConfig(seed=5, samples=1003, stage=2).split(4)


def test_pair_margin_small_run(worked_1d, euclid_2d):
    for m in (worked_1d, euclid_2d):
        rep = pair_margin(m, SamplerConfig(seed=1, samples=2000))
        assert rep.holds()
        assert set(rep.intra) <= {st_.n for st_ in m.stages}
        assert rep.overall <= min(rep.intra.values())


def test_pair_margin_sees_tampering(worked_1d):
    # R_1 moved onto the lattice value 100: differences of centers 11 and 111 do not exist,
    # but centers 11..36 differ by at most 25, so use a radius inside that range
    bad = worked_1d.with_stage(1, R=Scale.rat(20))
    rep = pair_margin(bad, SamplerConfig(seed=0, samples=5000, stage=1))
    assert not rep.holds()


def test_exact_density(worked_1d, euclid_2d):
    q, qf = exact_density(worked_1d, 1)
    assert q == Fraction(13, 201)
    q2, _ = exact_density(euclid_2d, 1)
    # 65^2 balls of radius 1/4 in the disc of radius sqrt(65538)
    assert q2 == Fraction(65 ** 2, 16 * 65538)


def test_mc_density_small(worked_1d):
    est = mc_density(worked_1d, 1, SamplerConfig(seed=2, samples=50_000))
    assert est.within and est.above_f
    assert est.exact == Fraction(13, 201)


def test_mc_density_rejects_coarse_floats(euclid_2d):
    with pytest.raises(ConfigError):
        mc_density(euclid_2d, 3, SamplerConfig(samples=10))


@pytest.mark.parametrize("norm", ["l1", "linf"])
@pytest.mark.parametrize("d", [1, 2, 3])
def test_demo_bound(norm, d):
    rep = thickened_lattice_demo(NormSpec.parse(norm, d), Fraction(1, 8), SamplerConfig(seed=d, samples=2000))
    assert rep.ok and rep.bound == Fraction(1, 4)
    assert rep.min_half_distance >= 0.25


def test_demo_cell_density():
    assert thickened_lattice_demo(NormSpec.linf(2), Fraction(1, 8), SamplerConfig(samples=1)).cell_density == Fraction(1, 16)
    assert thickened_lattice_demo(NormSpec.l1(3), Fraction(1, 8), SamplerConfig(samples=1)).cell_density == Fraction(1, 384)


@pytest.mark.parametrize("t", [Fraction(1, 4), Fraction(0), Fraction(1, 2)])
def test_demo_rejects(t):
    with pytest.raises(ConfigError):
        thickened_lattice_demo(NormSpec.linf(2), t, SamplerConfig())


def test_demo_rejects_l2():
    with pytest.raises(ConfigError):
        thickened_lattice_demo(NormSpec.l2(2), Fraction(1, 8), SamplerConfig())


def test_brute_pair_check(worked_1d, euclid_2d):
    assert brute_pair_check(worked_1d).passed
    assert brute_pair_check(euclid_2d, 1).passed
    bad = dict(mutation_corpus(worked_1d))["R_onto_lattice"]
    res = brute_pair_check(bad)
    assert not res.passed and res.violation[2] == 1
    with pytest.raises(ConfigError):
        brute_pair_check(euclid_2d, 2, budget=1000)


@settings(max_examples=10)
@given(st.sampled_from(["l1", "linf", "l2"]), st.integers(1, 2))
def test_brute_agrees_on_fresh_builds(norm, d):
    m = build(d, NormSpec.parse(norm, d), FSpec.parse("inv_poly:1"), 1)
    assert brute_pair_check(m, 1).passed
