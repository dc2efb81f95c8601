"""Lattice distance spectra rho(Z^d): representability, windows and gaps.

A *gap* is a pair (R, eps) such that no lattice vector has rho(v) in the
open interval (R - eps, R + eps).  Three kinds of evidence back a gap:

``euclidean``
    l2 with d >= 2.  Every integer k with sqrt(k) in the interval carries a
    non-representability witness that can be checked without primality
    testing.
``grid``
    rho(Z^d) lies in (1/D)Z and the interval contains no multiple of 1/D.
``enumerated``
    The interval sits between two consecutive values of a complete window.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DEFAULT_FACTOR_BUDGET, factorize
from .errors import (
    ConfigError,
    EnumerationBudgetExceeded,
    FactorizationBudgetExceeded,
    NonExactNormError,
)
from .norms import NormSpec, coordinate_extents, equivalence_constants, min_lattice_norm
from .scale import Lin, Scale, as_fraction, ceil_sqrt, floor_sqrt, largest_pow2_at_most, le, lt

DEFAULT_ENUM_BUDGET = 5_000_000
_SCAN_LIMIT = 100_000


# -- sums of squares -------------------------------------------------------

def nonrep_witness(d: int, k: int, factor_budget: int = DEFAULT_FACTOR_BUDGET):
    """Evidence that k is *not* a sum of d squares, or None if it is.

    Witness formats: d=1 ``"nonsquare"``; d=2 ``"q=<q>"`` with q an exactly
    dividing factor of k (gcd(q, k/q) = 1) and q = 3 mod 4; d=3
    ``"a=<a>,b=<b>"`` with k = 4^a (8b + 7).
    """
    if d < 1 or k < 0:
        raise ValueError("need d >= 1 and k >= 0")
    if d == 1:
        r = math.isqrt(k)
        return None if r * r == k else "nonsquare"
    if d >= 4 or k == 0:
        return None
    a, m = 0, k
    while m % 4 == 0:
        m //= 4
        a += 1
    if d == 3:
        return f"a={a},b={(m - 7) // 8}" if m % 8 == 7 else None
    if m % 4 == 3:
        return f"q={m}"
    for p, e in factorize(m, factor_budget).items():
        if p % 4 == 3 and e % 2 == 1:
            return f"q={p ** e}"
    return None


def check_witness(d: int, k: int, witness: str) -> bool:
    """Primality-free check of a :func:`nonrep_witness` certificate."""
    try:
        if d == 1:
            r = math.isqrt(k)
            return witness == "nonsquare" and r * r != k
        if d == 2:
            if not witness.startswith("q="):
                return False
            q = int(witness[2:])
            # q = 3 mod 4 forces a prime p = 3 mod 4 with odd exponent in q,
            # and exactness of the division carries that exponent into k
            return q > 0 and k % q == 0 and math.gcd(q, k // q) == 1 and q % 4 == 3
        if d == 3:
            fa, fb = witness.split(",")
            if not (fa.startswith("a=") and fb.startswith("b=")):
                return False
            a, b = int(fa[2:]), int(fb[2:])
            return a >= 0 and b >= 0 and k == 4 ** a * (8 * b + 7)
    except (ValueError, AttributeError):
        return False
    return False


def representable(d: int, k: int, factor_budget: int = DEFAULT_FACTOR_BUDGET) -> bool:
    """True iff k is a sum of d integer squares."""
    return nonrep_witness(d, k, factor_budget) is None


def square_decomposition(d: int, k: int, limit: int = 10 ** 10):
    """Some v in Z^d with |v|^2 = k, searched exhaustively for small k."""
    if k > limit:
        return None

    def rec(dd, kk, cap):
        if dd == 1:
            r = math.isqrt(kk)
            return (r,) if r * r == kk else None
        x = min(math.isqrt(kk), cap)
        while x >= 0:
            rest = rec(dd - 1, kk - x * x, x)
            if rest is not None:
                return (x,) + rest
            x -= 1
        return None

    return rec(d, k, math.isqrt(k))


# -- lattice enumeration ---------------------------------------------------

def _key_range(norm: NormSpec, a: Scale, b: Scale) -> tuple[int, int, int]:
    """Integer key bounds (klo, khi) and the key denominator for a window [a, b]."""
    if norm.kind == "l2" and norm.dim >= 2:
        return math.ceil(a.square), math.floor(b.square), 0
    D = norm.value_denominator
    if D is None:
        raise NonExactNormError(f"{norm} has no exact lattice spectrum")
    lo = math.ceil(a.value * D) if a.rational else ceil_sqrt(a.square * D * D)
    hi = math.floor(b.value * D) if b.rational else floor_sqrt(b.square * D * D)
    return lo, hi, D


def _key_to_scale(key: int, D: int) -> Scale:
    return Scale.sqrt(key) if D == 0 else Scale.rat(Fraction(key, D))


def _ceil_div(x: int, y: int) -> int:
    return -((-x) // y)


def _abs_ranges(lo: int, hi: int):
    """Integer t with lo <= |t| <= hi as a list of closed ranges."""
    lo = max(lo, 0)
    if hi < lo:
        return []
    if lo == 0:
        return [(-hi, hi)]
    return [(-hi, -lo), (lo, hi)]


def _linear_band(alphas, betas, K):
    """Closed integer interval of t with |alpha_i + beta_i t| <= K for all i."""
    L, U = None, None
    for al, be in zip(alphas, betas):
        if be == 0:
            if abs(al) > K:
                return None
            continue
        if be < 0:
            al, be = -al, -be
        lo, hi = _ceil_div(-K - al, be), (K - al) // be
        L = lo if L is None else max(L, lo)
        U = hi if U is None else min(U, hi)
        if L > U:
            return None
    return L, U


class _Counter:
    __slots__ = ("n", "budget")

    def __init__(self, budget):
        self.n, self.budget = 0, budget

    def add(self, k):
        self.n += k
        if self.n > self.budget:
            raise EnumerationBudgetExceeded(
                f"lattice enumeration exceeded its budget of {self.budget} points; "
                "the scale is beyond exact enumeration for this norm")


def enumerate_keys(norm: NormSpec, klo: int, khi: int, budget: int = DEFAULT_ENUM_BUDGET):
    """All keys in [klo, khi] attained on Z^d, each with one witness vector.

    Keys are |v|^2 for Euclidean norms and D*rho(v) otherwise.  The last
    coordinate is solved for directly in each slice, so only lattice points
    in the shell (plus one visit per outer prefix) are touched.
    """
    d, kind = norm.dim, norm.kind
    out: dict[int, tuple[int, ...]] = {}
    cnt = _Counter(budget)
    if khi < klo or khi < 0:
        return out, 0
    klo = max(klo, 0)
    euclid = kind == "l2" and d >= 2
    if kind == "poly":
        rows = norm.integer_rows()
        D = norm.value_denominator
        ext = coordinate_extents(norm)
        bounds = [math.floor(Fraction(khi, D) * h) for h in ext]
    elif euclid:
        bounds = [math.isqrt(khi)] * d
    else:
        bounds = [khi] * d

    def emit(prefix, t, key):
        if key not in out:
            out[key] = prefix + (t,)

    def last(prefix):
        cnt.add(1)
        if kind == "l2" and d >= 2:
            S = sum(c * c for c in prefix)
            if S > khi:
                return
            for lo, hi in _abs_ranges(ceil_sqrt(Fraction(max(klo - S, 0))), math.isqrt(khi - S)):
                cnt.add(hi - lo + 1)
                for t in range(lo, hi + 1):
                    emit(prefix, t, S + t * t)
        elif kind == "l1" or kind == "l2":
            s = sum(abs(c) for c in prefix)
            for lo, hi in _abs_ranges(klo - s, khi - s):
                cnt.add(hi - lo + 1)
                for t in range(lo, hi + 1):
                    emit(prefix, t, s + abs(t))
        elif kind == "linf":
            m = max((abs(c) for c in prefix), default=0)
            if m > khi:
                return
            ranges = _abs_ranges(0, khi) if m >= klo else _abs_ranges(klo, khi)
            for lo, hi in ranges:
                cnt.add(hi - lo + 1)
                for t in range(lo, hi + 1):
                    emit(prefix, t, max(m, abs(t)))
        else:
            alphas = [sum(r[i] * prefix[i] for i in range(d - 1)) for r in rows]
            betas = [r[d - 1] for r in rows]
            outer = _linear_band(alphas, betas, khi)
            if outer is None:
                return
            L, U = outer
            inner = _linear_band(alphas, betas, klo - 1) if klo > 0 else None
            ranges = [(L, U)] if inner is None else [(L, min(U, inner[0] - 1)), (max(L, inner[1] + 1), U)]
            for lo, hi in ranges:
                if hi < lo:
                    continue
                cnt.add(hi - lo + 1)
                for t in range(lo, hi + 1):
                    emit(prefix, t, max(abs(al + be * t) for al, be in zip(alphas, betas)))

    def rec(prefix):
        i = len(prefix)
        if i == d - 1:
            last(prefix)
            return
        cnt.add(1)
        B = bounds[i]
        if euclid:
            B = min(B, math.isqrt(max(khi - sum(c * c for c in prefix), 0)))
            if sum(c * c for c in prefix) > khi:
                return
        elif kind in ("l1", "l2"):
            B = min(B, khi - sum(abs(c) for c in prefix))
            if B < 0:
                return
        for x in range(-B, B + 1):
            rec(prefix + (x,))

    rec(())
    return dict(sorted(out.items())), cnt.n


@dataclass(frozen=True)
class SpectrumWindow:
    """Complete list of lattice rho-values in [lo, hi] with witnesses."""

    norm: NormSpec
    lo: Scale
    hi: Scale
    values: tuple[Scale, ...]
    witnesses: tuple[tuple[int, ...], ...]
    coordinate_bounds: tuple[int, ...] = ()
    examined: int = 0


def spectrum_window(norm: NormSpec, a, b, budget: int = DEFAULT_ENUM_BUDGET) -> SpectrumWindow:
    a, b = _as_scale(a), _as_scale(b)
    if not norm.exact:
        raise NonExactNormError(f"{norm} has no exact lattice spectrum")
    if b < a:
        raise ConfigError(f"empty window [{a}, {b}]")
    klo, khi, D = _key_range(norm, a, b)
    keys, examined = enumerate_keys(norm, klo, khi, budget)
    vals = tuple(_key_to_scale(k, D) for k in keys)
    if norm.kind == "poly":
        ext = coordinate_extents(norm)
        cb = tuple(math.floor(Fraction(khi, D) * h) for h in ext)
    else:
        cb = (math.isqrt(max(khi, 0)),) * norm.dim if D == 0 else (max(khi, 0),) * norm.dim
    return SpectrumWindow(norm, a, b, vals, tuple(keys.values()), cb, examined)


def _as_scale(x) -> Scale:
    return x if isinstance(x, Scale) else Scale.rat(as_fraction(x))


# -- gaps ------------------------------------------------------------------

@dataclass(frozen=True)
class GapCertificate:
    R: Scale
    eps: Fraction
    kind: str
    below: Scale | None = None
    above: Scale | None = None
    witnesses: tuple[tuple[int, str], ...] = ()
    denominator: int | None = None

    @property
    def witness_map(self) -> dict[int, str]:
        return dict(self.witnesses)


def _integers_in(R: Scale, w: Fraction, closed: bool, limit: int):
    """Integers k >= 0 with sqrt(k) in (R-w, R+w) (closed interval if asked)."""
    # absolute precision must beat 1/R so that squaring keeps the candidate range small
    bits = 64 + R.floor().bit_length()
    lo_b, hi_b = (R.lin() - w).bounds(bits), (R.lin() + w).bounds(bits)
    lo_f = max(lo_b[0], Fraction(0))
    kmin = max(math.floor(lo_f * lo_f) - 1, 0)
    kmax = math.ceil(hi_b[1] * hi_b[1]) + 1
    if kmax - kmin > limit:
        raise EnumerationBudgetExceeded(f"{kmax - kmin} integer candidates exceed budget {limit}")
    ok = le if closed else lt
    for k in range(kmin, kmax + 1):
        s = Scale.sqrt(k)
        if ok(R.lin() - w, s) and ok(s, R.lin() + w):
            yield k


def interval_hits(norm: NormSpec, R: Scale, w, closed: bool = False, witnesses=None,
                  deep: bool = False, enum_budget: int = DEFAULT_ENUM_BUDGET,
                  factor_budget: int = DEFAULT_FACTOR_BUDGET):
    """Lattice values within distance w of R, each with a lattice vector (or None).

    An empty result proves the interval is free of rho(Z^d).  Supplied
    witnesses are checked arithmetically; missing ones are re-derived, and
    ``deep`` re-derives all of them.
    """
    w = as_fraction(w)
    if not norm.exact:
        raise NonExactNormError(f"{norm} cannot be certified exactly")
    witnesses = witnesses or {}
    d = norm.dim
    hits = []
    if norm.kind == "l2" and d >= 2:
        for k in _integers_in(R, w, closed, enum_budget):
            given = witnesses.get(k)
            ok = given is not None and check_witness(d, k, given)
            if deep or not ok:
                derived = nonrep_witness(d, k, factor_budget)
                ok = derived is not None and check_witness(d, k, derived)
            if not ok:
                hits.append((Scale.sqrt(k), square_decomposition(d, k)))
        return hits
    D = norm.value_denominator
    ok = le if closed else lt
    lo_b = (R.lin() - w).bounds(64)[0]
    hi_b = (R.lin() + w).bounds(64)[1]
    grid = [m for m in range(max(math.floor(lo_b * D), 0), math.ceil(hi_b * D) + 1)
            if ok(R.lin() - w, Fraction(m, D)) and ok(Fraction(m, D), R.lin() + w)]
    if not grid:
        return hits
    win = spectrum_window(norm, Scale.rat(Fraction(grid[0], D)), Scale.rat(Fraction(grid[-1], D)), enum_budget)
    for v, wv in zip(win.values, win.witnesses):
        hits.append((v, wv))
    return hits


def verify_gap(norm: NormSpec, cert: GapCertificate, deep: bool = False,
               enum_budget: int = DEFAULT_ENUM_BUDGET, factor_budget: int = DEFAULT_FACTOR_BUDGET) -> bool:
    """Re-check that no lattice rho-value lies in (R - eps, R + eps)."""
    if cert.eps <= 0 or not lt(cert.eps, cert.R):
        return False
    hits = interval_hits(norm, cert.R, cert.eps, closed=False, witnesses=cert.witness_map,
                         deep=deep, enum_budget=enum_budget, factor_budget=factor_budget)
    return not hits


def _status(d, k, factor_budget):
    """'nonrep' with witness, 'rep', or 'unknown' when factoring runs out of budget."""
    try:
        w = nonrep_witness(d, k, factor_budget)
    except FactorizationBudgetExceeded:
        return "unknown", None
    return ("nonrep", w) if w is not None else ("rep", None)


def find_gap(norm: NormSpec, lower, enum_budget: int = DEFAULT_ENUM_BUDGET,
             factor_budget: int = DEFAULT_FACTOR_BUDGET) -> GapCertificate:
    """Smallest canonical gap (R, eps) with R >= lower.

    eps is the largest power of two not exceeding half the distance from R
    to the nearest lattice value.
    """
    lower = _as_scale(lower)
    if lower.square <= 0:
        raise ConfigError("find_gap needs lower > 0")
    if not norm.exact:
        raise NonExactNormError(f"{norm} cannot be certified exactly")
    d = norm.dim
    if norm.kind == "l2" and d >= 4:
        k = math.ceil(lower.square)
        R = Scale.sqrt(Fraction(2 * k + 1, 2))
        below, above = Scale.sqrt(k), Scale.sqrt(k + 1)
        return _finish(norm, R, below, above, "euclidean", factor_budget)
    if norm.kind == "l2" and d >= 2:
        return _euclidean_gap(norm, lower, factor_budget)
    D = norm.value_denominator
    if min_lattice_norm(norm) == Scale.rat(Fraction(1, D)):
        # every multiple of 1/D is attained, so consecutive grid points bound the gaps
        m = max(lower.floor() * D - 1, 0)
        while lt(Fraction(2 * m + 1, 2 * D), lower):
            m += 1
        R = Scale.rat(Fraction(2 * m + 1, 2 * D))
        return _finish(norm, R, Scale.rat(Fraction(m, D)), Scale.rat(Fraction(m + 1, D)), "grid", factor_budget)
    return _enumerated_gap(norm, lower, enum_budget, factor_budget)


def _euclidean_gap(norm, lower, factor_budget):
    d = norm.dim
    k = max(math.ceil(lower.square), 1)
    for _ in range(_SCAN_LIMIT):
        st, _w = _status(d, k, factor_budget)
        if st == "nonrep":
            break
        k += 1
    else:
        raise FactorizationBudgetExceeded(f"no certified non-representable integer found near {lower}")

    # unknown neighbours are treated as lattice values: smaller eps, never unsound
    def neighbour(start, step):
        j = start
        while j >= 0:
            if j == 0 or _status(d, j, factor_budget)[0] != "nonrep":
                return j
            j += step
        return 0

    below, above = neighbour(k - 1, -1), neighbour(k + 1, 1)
    return _finish(norm, Scale.sqrt(k), Scale.sqrt(below), Scale.sqrt(above), "euclidean", factor_budget)


def _enumerated_gap(norm, lower, enum_budget, factor_budget):
    D = norm.value_denominator
    delta = Fraction(4, D)
    lo_b, hi_b = lower.bounds(64)
    while True:
        a = Scale.rat(max(lo_b - delta, Fraction(0)))
        b = Scale.rat(hi_b + delta)
        vals = spectrum_window(norm, a, b, enum_budget).values
        for s, t in zip(vals, vals[1:]):
            mid = (s.value + t.value) / 2
            if le(lower, mid):
                return _finish(norm, Scale.rat(mid), s, t, "enumerated", factor_budget)
        delta *= 2


def _finish(norm, R, below, above, kind, factor_budget):
    half = min(R.lin() - below, above - R.lin()) / 2
    eps = largest_pow2_at_most(half)
    witnesses = ()
    if kind == "euclidean":
        ws = []
        for k in _integers_in(R, eps, False, 10 ** 6):
            w = nonrep_witness(norm.dim, k, factor_budget)
            if w is None:
                raise AssertionError(f"lattice value sqrt({k}) inside a planned gap")
            ws.append((k, w))
        witnesses = tuple(ws)
    D = norm.value_denominator if kind != "euclidean" else None
    return GapCertificate(R, eps, kind, below, above, witnesses, D)
