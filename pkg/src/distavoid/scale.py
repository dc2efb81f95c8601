"""Exact nonnegative scales (rationals and square roots of rationals).

Every radius, distance and norm value that feeds a certificate is a
:class:`Scale`.  Scales are totally ordered by comparing their squares, so
no floating point ever enters a comparison.  Mixed expressions such as
``rho(w) + r - R/2`` are handled by :class:`Lin`, a rational linear
combination of square roots with an exact sign test.
"""
from __future__ import annotations

import contextlib
import functools
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import UndecidedComparison

Rational = Union[int, Fraction]

#: Bits used when rounding irrational constants outward to dyadic rationals.
OUTWARD_BITS = 16


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or a decimal integer.  Decimal points are rejected."""
    t = text.strip()
    if "/" in t:
        num, den = t.split("/", 1)
        if not _is_int(num) or not _is_int(den):
            raise ValueError(f"not an exact rational: {text!r}")
        if int(den) == 0:
            raise ValueError(f"zero denominator: {text!r}")
        return Fraction(int(num), int(den))
    if not _is_int(t):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(int(t))


def _is_int(s: str) -> bool:
    s = s.strip()
    if s[:1] in "+-":
        s = s[1:]
    return s.isdigit()


def format_rational(q: Fraction) -> str:
    q = as_fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


# -- integer roots ---------------------------------------------------------

def iroot(n: int, k: int) -> int:
    """floor(n ** (1/k)) for n >= 0."""
    if n < 0:
        raise ValueError("iroot of a negative number")
    if k == 1 or n < 2:
        return n
    if k == 2:
        return math.isqrt(n)
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x ** k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def rational_root(q: Fraction, k: int):
    """Exact k-th root of a nonnegative rational, or ``None`` if irrational."""
    q = as_fraction(q)
    a, b = iroot(q.numerator, k), iroot(q.denominator, k)
    if a ** k == q.numerator and b ** k == q.denominator:
        return Fraction(a, b)
    return None


def root_bounds(q: Fraction, k: int, bits: int = OUTWARD_BITS) -> tuple[Fraction, Fraction]:
    """Dyadic ``lo <= q**(1/k) <= hi`` with ``hi - lo <= 2**-bits``."""
    q = as_fraction(q)
    if q < 0:
        raise ValueError("root of a negative number")
    exact = rational_root(q, k)
    if exact is not None:
        return exact, exact
    scale = 1 << bits
    # floor(floor(X) ** (1/k)) == floor(X ** (1/k))
    lo = iroot((q.numerator * scale ** k) // q.denominator, k)
    return Fraction(lo, scale), Fraction(lo + 1, scale)


def floor_sqrt(q: Fraction) -> int:
    q = as_fraction(q)
    return math.isqrt(q.numerator // q.denominator)


def ceil_sqrt(q: Fraction) -> int:
    r = floor_sqrt(q)
    return r if r * r == q else r + 1


def dyadic_floor(x: Fraction, bits: int = OUTWARD_BITS) -> Fraction:
    return Fraction(math.floor(x * (1 << bits)), 1 << bits)


def dyadic_ceil(x: Fraction, bits: int = OUTWARD_BITS) -> Fraction:
    return Fraction(math.ceil(x * (1 << bits)), 1 << bits)


@contextlib.contextmanager
def unlimited_int_digits():
    """Lift the interpreter's int/str digit cap for the duration of the block.

    Late stages carry integers with thousands of digits; manifests store
    them in decimal, so reading, writing and reporting need the cap off.
    """
    get = getattr(sys, "get_int_max_str_digits", None)
    if get is None:
        yield
        return
    old = get()
    sys.set_int_max_str_digits(0)
    try:
        yield
    finally:
        sys.set_int_max_str_digits(old)


# -- scales ----------------------------------------------------------------

@functools.total_ordering
@dataclass(frozen=True)
class Scale:
    """A nonnegative real that is either a rational or sqrt of a rational.

    The representation is canonical: ``Scale.sqrt(4)`` is stored as the
    rational 2, so dataclass equality coincides with numeric equality.
    """

    square: Fraction
    rational: bool

    def __post_init__(self):
        if self.square < 0:
            raise ValueError("scales are nonnegative")

    @classmethod
    def rat(cls, q) -> "Scale":
        q = as_fraction(q)
        if q < 0:
            raise ValueError(f"negative scale {q}")
        return cls(q * q, True)

    @classmethod
    def sqrt(cls, q) -> "Scale":
        q = as_fraction(q)
        if q < 0:
            raise ValueError(f"negative radicand {q}")
        return cls(q, rational_root(q, 2) is not None)

    @property
    def kind(self) -> str:
        return "rat" if self.rational else "sqrt"

    @property
    def value(self) -> Fraction:
        """The rational value; only defined for rational scales."""
        if not self.rational:
            raise ValueError(f"{self} is irrational")
        return rational_root(self.square, 2)

    def scaled(self, c) -> "Scale":
        c = as_fraction(c)
        if c < 0:
            raise ValueError("negative scale factor")
        return Scale(self.square * c * c, self.rational)

    def lin(self) -> "Lin":
        if self.rational:
            return Lin(self.value)
        return Lin(Fraction(0), {self.square: Fraction(1)})

    def bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        if self.rational:
            v = self.value
            return v, v
        return root_bounds(self.square, 2, bits)

    def floor(self) -> int:
        return floor_sqrt(self.square)

    def __lt__(self, other):
        if not isinstance(other, Scale):
            return NotImplemented
        return self.square < other.square

    def __float__(self):
        try:
            return math.sqrt(self.square) if not self.rational else float(self.value)
        except OverflowError:
            return math.inf

    def __str__(self):
        if self.rational:
            return format_rational(self.value)
        return "sqrt:" + format_rational(self.square)

    def __repr__(self):
        return f"Scale({self})"

    @classmethod
    def parse(cls, text: str) -> "Scale":
        t = text.strip()
        if t.startswith("sqrt:"):
            return cls.sqrt(parse_rational(t[5:]))
        return cls.rat(parse_rational(t))


def smax(*xs: Scale) -> Scale:
    return max(xs)


# -- linear combinations of square roots -----------------------------------

def _sgn(x) -> int:
    return (x > 0) - (x < 0)


class Lin:
    """``const + sum(coef * sqrt(radicand))`` with rational data.

    ``sign()`` is exact whenever at most two distinct radicands remain;
    beyond that it falls back to interval refinement and raises
    :class:`UndecidedComparison` if the value cannot be separated from 0.
    """

    __slots__ = ("const", "terms")

    def __init__(self, const=0, terms=None):
        self.const = as_fraction(const)
        self.terms = {}
        for q, c in (terms or {}).items():
            q, c = as_fraction(q), as_fraction(c)
            if c == 0 or q == 0:
                continue
            r = rational_root(q, 2)
            if r is not None:
                self.const += c * r
            else:
                self.terms[q] = self.terms.get(q, Fraction(0)) + c
        self.terms = {q: c for q, c in self.terms.items() if c != 0}

    @staticmethod
    def of(x) -> "Lin":
        if isinstance(x, Lin):
            return x
        if isinstance(x, Scale):
            return x.lin()
        return Lin(as_fraction(x))

    def __add__(self, other):
        o = Lin.of(other)
        t = dict(self.terms)
        for q, c in o.terms.items():
            t[q] = t.get(q, Fraction(0)) + c
        return Lin(self.const + o.const, t)

    __radd__ = __add__

    def __neg__(self):
        return Lin(-self.const, {q: -c for q, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-Lin.of(other))

    def __rsub__(self, other):
        return Lin.of(other) - self

    def __mul__(self, k):
        k = as_fraction(k)
        return Lin(self.const * k, {q: c * k for q, c in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, k):
        return self * (1 / as_fraction(k))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def sign(self) -> int:
        terms = sorted(self.terms.items())
        if len(terms) <= 2:
            return _exact_sign(self.const, terms)
        return self._interval_sign()

    def _interval_sign(self, max_bits: int = 4096) -> int:
        bits = 64
        while bits <= max_bits:
            lo = hi = self.const
            for q, c in self.terms.items():
                a, b = root_bounds(q, 2, bits)
                lo += min(c * a, c * b)
                hi += max(c * a, c * b)
            if lo > 0:
                return 1
            if hi < 0:
                return -1
            bits *= 4
        raise UndecidedComparison(f"cannot separate {self} from zero")

    def bounds(self, bits: int = 64) -> tuple[Fraction, Fraction]:
        lo = hi = self.const
        for q, c in self.terms.items():
            a, b = root_bounds(q, 2, bits)
            lo += min(c * a, c * b)
            hi += max(c * a, c * b)
        return lo, hi

    def __float__(self):
        try:
            return float(self.const) + sum(float(c) * math.sqrt(q) for q, c in self.terms.items())
        except OverflowError:
            # beyond double range; only reports ever ask for this
            return math.copysign(math.inf, self.sign())

    def __repr__(self):
        parts = [format_rational(self.const)]
        parts += [f"{format_rational(c)}*sqrt({format_rational(q)})" for q, c in sorted(self.terms.items())]
        return "Lin(" + " + ".join(parts) + ")"


def _exact_sign(const: Fraction, terms) -> int:
    # value = P + c*sqrt(q); compare |P| with |c|sqrt(q) by squaring when signs differ
    if not terms:
        return _sgn(const)
    (q, c), rest = terms[-1], terms[:-1]
    sp = _exact_sign(const, rest)
    sq = _sgn(c)
    if sp == 0 or sp == sq:
        return sq if sp == 0 else sp
    if rest:
        (q1, c1), = rest
        p_sq = Lin(const * const + c1 * c1 * q1, {q1: 2 * const * c1})
    else:
        p_sq = Lin(const * const)
    diff = (p_sq - c * c * q).sign()
    if diff > 0:
        return sp
    if diff < 0:
        return sq
    return 0


def lt(a, b) -> bool:
    return (Lin.of(a) - Lin.of(b)).sign() < 0


def le(a, b) -> bool:
    return (Lin.of(a) - Lin.of(b)).sign() <= 0


def largest_pow2_at_most(x) -> Fraction:
    """Largest ``2**j`` (j any integer) with ``2**j <= x``; ``x`` a positive Lin/Scale/rational."""
    x = Lin.of(x)
    if x.sign() <= 0:
        raise ValueError("need a positive quantity")
    bits = 64
    lo = x.bounds(bits)[0]
    # a difference of huge roots can be far below 2**-64; refine until it separates from 0
    while lo <= 0:
        bits *= 4
        lo = x.bounds(bits)[0]
    j = lo.numerator.bit_length() - lo.denominator.bit_length()
    p = Fraction(2) ** j
    while not le(p, x):
        p /= 2
    while le(p * 2, x):
        p *= 2
    return p


def lin_floor(x) -> int:
    """Exact floor of a Scale / Lin / rational."""
    x = Lin.of(x)
    lo, _ = x.bounds(64)
    f = math.floor(lo)
    while le(f + 1, x):
        f += 1
    while lt(x, f):
        f -= 1
    return f
