from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from distavoid import FSpec, NormSpec, build
from distavoid.builder import initial_eps, place_cube, plan_stage
from distavoid.errors import BudgetExceeded, ConfigError, NonExactNormError
from distavoid.manifest_io import dumps
from distavoid.norms import equivalence_constants
from distavoid.scale import Scale
from distavoid.spectrum import representable


def test_worked_example(worked_1d):
    s1, s2 = worked_1d.stages
    assert worked_1d.eps0 == 1
    assert s1.R == Scale.rat(Fraction(201, 2)) and s1.eps == Fraction(1, 4)
    assert s1.anchor == (11,) and s1.side == 25 and s1.ball_count == 26
    assert s1.ball_radius == Fraction(1, 4)
    assert s2.R == Scale.rat(Fraction(20101, 2))
    assert s2.anchor == (1006,) and s2.side == 2512 and s2.ball_radius == Fraction(1, 16)
    assert worked_1d.certification.certified


def test_euclid_2d_first_stage(euclid_2d):
    s1 = euclid_2d.stage(1)
    assert s1.R == Scale.sqrt(65538)
    assert Scale.rat(256) <= s1.R <= Scale.rat(300)
    assert not representable(2, 65538)
    assert s1.gap.witnesses == ((65538, "q=11"),)
    assert s1.anchor == (11, 0) and s1.side == 64


def test_place_cube_examples():
    norm = NormSpec.l2(2)
    consts = equivalence_constants(norm)
    R, Rp = Scale.rat(1000), Scale.rat(1)
    assert place_cube(norm, consts, R, Rp, 250, Fraction(1, 4)) == (11, 0)
    assert place_cube(norm, consts, R, Rp, 400, Fraction(1, 4)) is None
    with pytest.raises(ConfigError):
        place_cube(norm, consts, R, Rp, -1, Fraction(1, 4))


def test_linf_half_integer_radius():
    m = build(2, NormSpec.linf(2), FSpec.parse("inv_poly:1"), 2)
    for st_ in m.stages:
        assert st_.R.rational and st_.R.value.denominator == 2


def test_initial_eps():
    assert initial_eps(Scale.rat(1)) == 1
    assert initial_eps(Scale.rat(Fraction(2, 3))) == Fraction(1, 2)
    assert initial_eps(Scale.sqrt(2)) == 1


@pytest.mark.parametrize("args,exc", [
    ((1, NormSpec.l2(1), FSpec.parse("step:[(1,1)]"), 1), ConfigError),
    ((1, NormSpec.l2(1), FSpec.parse("inv_poly:1"), 0), ConfigError),
    ((2, NormSpec.l2(1), FSpec.parse("inv_poly:1"), 1), ConfigError),
    ((2, NormSpec.lp(2, 3), FSpec.parse("inv_poly:1"), 1), NonExactNormError),
])
def test_build_rejects(args, exc):
    with pytest.raises(exc):
        build(*args)


def test_determinism(euclid_2d):
    again = build(2, NormSpec.l2(2), FSpec.parse("inv_poly:1"), 3)
    assert dumps(again) == dumps(euclid_2d)


def test_plan_stage_matches_build(worked_1d):
    norm = NormSpec.l2(1)
    consts = equivalence_constants(norm)
    s1 = plan_stage(None, FSpec.parse("inv_poly:1"), norm, consts, Fraction(1))
    assert s1 == worked_1d.stage(1)
    assert plan_stage(s1, FSpec.parse("inv_poly:1"), norm, consts, Fraction(1)) == worked_1d.stage(2)


CASES = [
    (1, "l2", "inv_poly:1"), (1, "l2", "inv_log"), (2, "l2", "inv_poly:1/2"), (2, "linf", "step:[(10,1/2),(1000,0)]"),
    (2, "l1", "inv_poly:1"), (2, "poly:[(1,0),(0,1),(2/3,2/3)]", "inv_poly:1"), (3, "l2", "inv_poly:1"),
    (3, "linf", "inv_poly:2"), (4, "l2", "inv_poly:2"),
]


@pytest.mark.parametrize("d,norm,f", CASES, ids=[f"{d}-{n}-{f}" for d, n, f in CASES])
def test_structural_invariants(d, norm, f):
    m = build(d, NormSpec.parse(norm, d), FSpec.parse(f), 2)
    assert m.certification.certified
    prev_R, prev_eps = Scale.rat(1), m.eps0
    for st_ in m.stages:
        assert st_.R >= prev_R.scaled(100)
        assert 0 < st_.eps <= prev_eps and st_.eps <= st_.gap.eps
        assert st_.eps_prev == prev_eps and st_.ball_radius == prev_eps / 4
        assert st_.ball_count == (st_.side + 1) ** d
        assert m.f.density_holds(st_.ball_count * st_.ball_radius ** d, st_.R, d)
        prev_R, prev_eps = st_.R, st_.eps


@settings(max_examples=15)
@given(st.sampled_from(["l2", "l1", "linf"]), st.integers(1, 3),
       st.fractions(Fraction(1, 4), 3, max_denominator=4))
def test_random_builds_certify(norm, d, alpha):
    m = build(d, NormSpec.parse(norm, d), FSpec("inv_poly", alpha=alpha), 2)
    assert m.certification.certified
    assert all(a.R < b.R for a, b in zip(m.stages, m.stages[1:]))


def test_inv_log_polytope_exhausts_budget():
    with pytest.raises(BudgetExceeded):
        build(2, NormSpec.parse("poly:[(1,0),(0,1),(2/3,2/3)]", 2), FSpec.parse("inv_log"), 1)


def test_l2_inv_log_second_stage_refused():
    with pytest.raises(BudgetExceeded):
        build(2, NormSpec.l2(2), FSpec.parse("inv_log"), 2)
