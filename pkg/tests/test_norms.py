import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from brute import box_vectors, exact_norm
from distavoid.errors import ConfigError, NonExactNormError
from distavoid.norms import (Enclosure, NormSpec, compare_norm_to, coordinate_extents, equivalence_constants,
                             eval_norm, min_lattice_norm, norm_enclosure, unit_ball_vertices, unit_ball_volume)
from distavoid.scale import Scale

HEX = NormSpec.parse("poly:[(1,0),(0,1),(1,1)]", 2)
SKEW = NormSpec.parse("poly:[(1,0),(0,1),(2/3,2/3)]", 2)
OCT3 = NormSpec.parse("poly:[(1,0,0),(0,1,0),(0,0,1),(1/2,1/2,1/2)]", 3)
EXACT_NORMS = [NormSpec.l1(2), NormSpec.l2(2), NormSpec.linf(2), NormSpec.l1(3), NormSpec.l2(3),
               NormSpec.linf(3), HEX, SKEW, OCT3]

coords = st.fractions(-50, 50, max_denominator=30)


def rand_vec(rng, d):
    return [Fraction(rng.randint(-400, 400), rng.randint(1, 40)) for _ in range(d)]


def sq(s: Scale) -> Fraction:
    return s.square


# -- examples --

def test_eval_examples():
    assert eval_norm(NormSpec.l2(2), (3, 4)) == Scale.rat(5)
    assert eval_norm(NormSpec.l2(2), (1, 1)) == Scale.sqrt(2)
    assert eval_norm(NormSpec.linf(3), (-2, 1, Fraction(3, 2))) == Scale.rat(2)
    assert eval_norm(HEX, (1, -1)) == Scale.rat(1)


def test_eval_dimension_mismatch():
    with pytest.raises(ConfigError):
        eval_norm(NormSpec.l2(2), (1, 2, 3))


def test_compare_examples():
    l2 = NormSpec.l2(2)
    assert compare_norm_to(l2, (1, 1), Scale.rat(Fraction(3, 2))) == -1
    assert compare_norm_to(l2, (3, 4), Scale.rat(5)) == 0
    assert compare_norm_to(l2, (2, 1), Scale.sqrt(3)) == 1


def test_compare_refuses_general_lp():
    with pytest.raises(NonExactNormError):
        compare_norm_to(NormSpec.lp(2, 3), (1, 1), Scale.rat(1))


def test_general_lp_enclosure():
    e = eval_norm(NormSpec.lp(2, 3), (1, 1), width=Fraction(1, 2 ** 30))
    assert isinstance(e, Enclosure) and not e.exact
    assert e.lo <= 2 ** (1 / 3) <= e.hi and e.width <= Fraction(1, 2 ** 30)


@pytest.mark.parametrize("text,dim", [("poly:[(1,1),(2,2)]", 2), ("lp:1/2", 2), ("l3", 2), ("poly:[(1,0)", 2),
                                      ("poly:[(1,0),(0,1)]", 3), ("poly:[(0.5,0),(0,1)]", 2)])
def test_parse_errors(text, dim):
    with pytest.raises(ConfigError):
        NormSpec.parse(text, dim)


def test_parse_text_round_trip():
    for n in EXACT_NORMS + [NormSpec.lp(3, Fraction(5, 2))]:
        assert NormSpec.parse(n.text, n.dim) == n


# -- norm axioms, exactly, 10^4 random vectors per built-in family --

@pytest.mark.parametrize("norm", [NormSpec.l1(3), NormSpec.l2(3), NormSpec.linf(3), HEX],
                         ids=lambda n: f"{n.text}-d{n.dim}")
def test_norm_axioms_random(norm):
    rng = random.Random(7)
    d = norm.dim
    for _ in range(10_000):
        x, y = rand_vec(rng, d), rand_vec(rng, d)
        lam = Fraction(rng.randint(-20, 20), rng.randint(1, 9))
        rx, ry = eval_norm(norm, x), eval_norm(norm, y)
        assert sq(eval_norm(norm, [lam * c for c in x])) == lam * lam * sq(rx)
        rxy = eval_norm(norm, [a + b for a, b in zip(x, y)])
        assert rxy.lin() <= rx.lin() + ry.lin()
        assert (rx.square == 0) == (not any(x))


@given(st.sampled_from(EXACT_NORMS), st.data())
def test_norm_axioms_property(norm, data):
    x = data.draw(st.lists(coords, min_size=norm.dim, max_size=norm.dim))
    y = data.draw(st.lists(coords, min_size=norm.dim, max_size=norm.dim))
    rx, ry = eval_norm(norm, x), eval_norm(norm, y)
    assert eval_norm(norm, [-c for c in x]) == rx
    assert eval_norm(norm, [a + b for a, b in zip(x, y)]).lin() <= rx.lin() + ry.lin()
    assert (rx.square == 0) == (not any(x))


@given(st.sampled_from(EXACT_NORMS), st.data())
def test_compare_agrees_with_eval(norm, data):
    x = data.draw(st.lists(coords, min_size=norm.dim, max_size=norm.dim))
    t = data.draw(st.one_of(st.builds(Scale.rat, st.fractions(0, 100, max_denominator=20)),
                            st.builds(Scale.sqrt, st.fractions(0, 5000, max_denominator=20))))
    v = eval_norm(norm, x)
    expect = -1 if v < t else (0 if v == t else 1)
    assert compare_norm_to(norm, x, t) == expect


# -- equivalence constants --

def test_equivalence_examples():
    for d in (1, 2, 5):
        c = equivalence_constants(NormSpec.l2(d))
        assert (c.c_lo, c.C_hi) == (1, 1)
    c = equivalence_constants(NormSpec.linf(3))
    assert c.C_hi == 1 and c.c_lo <= Fraction(1) / Fraction(3) ** 0 and 3 * c.c_lo ** 2 <= 1
    c = equivalence_constants(NormSpec.l1(2))
    assert c.c_lo == 1 and c.C_hi ** 2 >= 2


def test_degenerate_polytope():
    with pytest.raises(ConfigError):
        NormSpec.poly([(1, 2), (2, 4)])


@pytest.mark.parametrize("norm", EXACT_NORMS + [NormSpec.lp(2, 3), NormSpec.lp(3, Fraction(3, 2))],
                         ids=lambda n: f"{n.text}-d{n.dim}")
def test_equivalence_soundness_random(norm):
    c = equivalence_constants(norm)
    rng = random.Random(11)
    for _ in range(2000):
        x = rand_vec(rng, norm.dim)
        n2 = sum(v * v for v in x)
        r = eval_norm(norm, x)
        if isinstance(r, Enclosure):
            assert c.c_lo ** 2 * n2 <= r.hi ** 2 and r.lo ** 2 <= c.C_hi ** 2 * n2
        else:
            assert c.c_lo ** 2 * n2 <= r.square <= c.C_hi ** 2 * n2


@pytest.mark.parametrize("norm", [NormSpec.linf(3), NormSpec.l1(2), HEX, SKEW, OCT3], ids=lambda n: n.text)
def test_equivalence_soundness_dense_sphere(norm):
    # dense float sampling of the Euclidean sphere, as an independent sanity check
    rng = np.random.default_rng(0)
    u = rng.normal(size=(200_000, norm.dim))
    u /= np.linalg.norm(u, axis=1)[:, None]
    from distavoid.norms import norm_values
    vals = norm_values(norm, u)
    c = equivalence_constants(norm)
    assert vals.min() >= float(c.c_lo) - 1e-12
    assert vals.max() <= float(c.C_hi) + 1e-12


def test_polytope_vertices_hex():
    verts = unit_ball_vertices(HEX)
    assert set(verts) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1)}
    assert coordinate_extents(HEX) == [1, 1]


# -- minimum lattice norm --

@pytest.mark.parametrize("norm,expected", [(NormSpec.l2(2), Scale.rat(1)), (NormSpec.linf(5), Scale.rat(1)),
                                           (HEX, Scale.rat(1)), (SKEW, Scale.rat(1))])
def test_min_lattice_norm(norm, expected):
    assert min_lattice_norm(norm) == expected


@pytest.mark.parametrize("norm", EXACT_NORMS, ids=lambda n: f"{n.text}-d{n.dim}")
def test_min_lattice_norm_brute(norm):
    rows = norm.functionals if norm.kind == "poly" else None
    best = None
    for v in box_vectors(norm.dim, 3):
        if any(v):
            is_sqrt, x = exact_norm(norm.kind, v, rows)
            val = x if is_sqrt else x * x
            best = val if best is None else min(best, val)
    assert min_lattice_norm(norm).square == best


# -- volumes --

def test_exact_volumes():
    assert unit_ball_volume(NormSpec.linf(3)).value == 8
    assert unit_ball_volume(NormSpec.l1(2)).value == 2
    v = unit_ball_volume(NormSpec.l2(2))
    assert (v.coef, v.pi_power) == (1, 1)
    v = unit_ball_volume(NormSpec.l2(3))
    assert (v.coef, v.pi_power) == (Fraction(4, 3), 1)
    for d in range(1, 9):
        v = unit_ball_volume(NormSpec.l2(d))
        assert v.value == pytest.approx(math.pi ** (d / 2) / math.gamma(d / 2 + 1), rel=1e-12)


def test_statistical_volume_l2():
    v = unit_ball_volume(NormSpec.l2(2), budget=400_000, seed=3, method="mc")
    assert v.kind == "statistical"
    assert abs(v.estimate - math.pi) <= 4 * v.stderr
    assert v.lower <= v.estimate


def test_statistical_volume_polytope():
    v = unit_ball_volume(HEX, budget=200_000, seed=1)
    # the hexagon with vertices above has area 3
    assert abs(v.estimate - 3) <= 4 * v.stderr and v.lower <= v.estimate


def test_volume_needs_budget():
    with pytest.raises(ConfigError):
        unit_ball_volume(HEX)


# -- float enclosures --

@pytest.mark.parametrize("norm", EXACT_NORMS, ids=lambda n: f"{n.text}-d{n.dim}")
def test_norm_enclosure_contains_exact(norm):
    rng = np.random.default_rng(5)
    lo = rng.uniform(-10, 10, size=(300, norm.dim))
    hi = lo + rng.uniform(0, 1, size=lo.shape)
    elo, ehi = norm_enclosure(norm, lo, hi)
    for i in range(0, 300, 7):
        # the box midpoint and corners lie inside the enclosure
        for pt in (lo[i], hi[i], (lo[i] + hi[i]) / 2):
            v = eval_norm(norm, [Fraction(float(c)) for c in pt])
            a, b = v.bounds(80)
            assert elo[i] <= b and a <= ehi[i]
