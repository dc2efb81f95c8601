"""Integer factorization with an explicit work budget.

Only the *search* side of the package relies on these routines.  Any
non-representability claim built from a factorization is re-checked by a
primality-free witness (see :func:`distavoid.spectrum.check_witness`), so a
probable prime slipping through here can cost tightness, never soundness.
"""
from __future__ import annotations

import math

from .errors import FactorizationBudgetExceeded

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]

# Deterministic Miller-Rabin with the first 13 primes as bases holds for n < 3.3e24.
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981

DEFAULT_FACTOR_BUDGET = 200_000


def is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    bases = _SMALL_PRIMES[:13] if n < _MR_DETERMINISTIC_LIMIT else _SMALL_PRIMES + [53, 59, 61, 67, 71]
    for a in bases:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, c: int, budget: int) -> tuple[int, int]:
    """One Pollard-Brent run; returns (factor or n, iterations used)."""
    y, r, q, g = 2, 1, 1, 1
    m = 128
    used = 0
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        used += r
        r *= 2
        if used > budget:
            return n, used
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g, used


def factorize(n: int, budget: int = DEFAULT_FACTOR_BUDGET) -> dict[int, int]:
    """Prime factorization ``{p: e}`` of ``n >= 1``.

    Trial division by small primes, then Pollard-Brent.  ``budget`` caps the
    total number of rho iterations; exceeding it raises
    :class:`FactorizationBudgetExceeded`.
    """
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    out: dict[int, int] = {}
    for p in range(2, 1000):
        if p * p > n:
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    stack = [n] if n > 1 else []
    spent = 0
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        r = math.isqrt(m)
        if r * r == m:
            stack += [r, r]
            continue
        c = 1
        while True:
            g, used = _brent(m, c, budget - spent)
            spent += used
            if spent > budget:
                raise FactorizationBudgetExceeded(f"could not split {m} within {budget} iterations")
            if 1 < g < m:
                stack += [g, m // g]
                break
            c += 1
    return dict(sorted(out.items()))
