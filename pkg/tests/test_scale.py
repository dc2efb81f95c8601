import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from distavoid.errors import UndecidedComparison
from distavoid.scale import (Lin, Scale, dyadic_ceil, dyadic_floor, iroot, largest_pow2_at_most, le, lin_floor, lt,
                             parse_rational, root_bounds)

rationals = st.fractions(min_value=0, max_value=10 ** 6, max_denominator=10 ** 4)
small_pos = st.fractions(min_value=Fraction(1, 1000), max_value=1000, max_denominator=1000)


def hp(x):
    """High-precision float of a Scale for cross-checking."""
    with mpmath.workdps(80):
        return mpmath.sqrt(mpmath.mpf(x.square.numerator) / x.square.denominator)


@given(rationals, rationals)
def test_scale_order_matches_squares(a, b):
    x, y = Scale.sqrt(a), Scale.sqrt(b)
    assert (x < y) == (a < b)
    assert (x == y) == (a == b)


@given(rationals)
def test_sqrt_round_trip(q):
    s = Scale.sqrt(q)
    assert s.square == q
    assert Scale.parse(str(s)) == s


def test_canonical_forms():
    assert Scale.sqrt(4) == Scale.rat(2)
    assert Scale.sqrt(Fraction(9, 4)).rational
    assert str(Scale.sqrt(2)) == "sqrt:2"
    assert str(Scale.rat(Fraction(201, 2))) == "201/2"
    with pytest.raises(ValueError):
        Scale.rat(-1)
    with pytest.raises(ValueError):
        Scale.sqrt(2).value


@pytest.mark.parametrize("text", ["0.25", "1e3", "1/0", "", "a/b", "1/2/3"])
def test_parse_rational_rejects(text):
    with pytest.raises(ValueError):
        parse_rational(text)


def test_parse_rational_accepts():
    assert parse_rational(" -3/6 ") == Fraction(-1, 2)
    assert parse_rational("+7") == 7


@given(st.integers(0, 10 ** 40), st.integers(1, 7))
def test_iroot(n, k):
    r = iroot(n, k)
    assert r ** k <= n < (r + 1) ** k


@given(small_pos, st.integers(2, 5))
def test_root_bounds_bracket(q, k):
    lo, hi = root_bounds(q, k, 20)
    assert lo ** k <= q <= hi ** k
    assert hi - lo <= Fraction(1, 2 ** 20)


@given(small_pos)
def test_dyadic_rounding_is_outward(x):
    assert dyadic_floor(x) <= x <= dyadic_ceil(x)


terms = st.dictionaries(st.integers(2, 200), st.fractions(-50, 50, max_denominator=20), max_size=2)


@given(st.fractions(-100, 100, max_denominator=50), terms)
def test_lin_sign_agrees_with_high_precision(c, t):
    x = Lin(c, t)
    with mpmath.workdps(60):
        v = mpmath.mpf(x.const.numerator) / x.const.denominator + sum(
            mpmath.mpf(k.numerator) / k.denominator * mpmath.sqrt(q) for q, k in x.terms.items())
        if abs(v) > mpmath.mpf(10) ** -40:
            assert x.sign() == (1 if v > 0 else -1)
        else:
            assert x.sign() == 0


def test_lin_exact_zero_detection():
    assert (Lin(0, {8: 1}) - Lin(0, {2: 2})).sign() == 0
    assert Lin(0, {2: 1, 3: 1}).sign() == 1
    assert Lin(1, {2: 1, 3: -1}).sign() == 1
    # 5 + 2 sqrt(6) = (sqrt 2 + sqrt 3)^2
    assert Lin(0, {2: 1, 3: 1}) < Lin(Fraction(32, 10))


def test_lin_three_radicals_uses_refinement():
    assert Lin(0, {2: 1, 3: 1, 5: -1}).sign() == 1
    # within 2^-100 of zero: refinement to 64 bits cannot separate it
    approx = sum(root_bounds(q, 2, 100)[0] for q in (2, 3, 5))
    tiny = Lin(-approx, {2: 1, 3: 1, 5: 1})
    with pytest.raises(UndecidedComparison):
        tiny._interval_sign(max_bits=64)
    assert tiny.sign() == 1


@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=10 ** 6, max_denominator=10 ** 6))
def test_largest_pow2(x):
    p = largest_pow2_at_most(x)
    assert p <= x < 2 * p
    assert p.numerator == 1 or p.denominator == 1


@given(st.integers(1, 10 ** 12))
def test_largest_pow2_of_sqrt(k):
    p = largest_pow2_at_most(Scale.sqrt(k))
    assert p * p <= k < 4 * p * p


@given(rationals, st.fractions(-100, 100, max_denominator=10))
def test_lin_floor(q, c):
    x = Scale.sqrt(q).lin() + c
    f = lin_floor(x)
    assert Lin(f) <= x < Lin(f + 1)


def test_pow2_of_tiny_root_difference():
    # sqrt(K + 1) - sqrt(K) ~ 1 / (2 sqrt K) sits far below 2**-64 here
    K = 10 ** 400
    x = Scale.sqrt(K + 1).lin() - Scale.sqrt(K).lin()
    p = largest_pow2_at_most(x)
    assert le(p, x) and lt(x, p * 2)
    assert math.isinf(float(Scale.sqrt(K * K)))
