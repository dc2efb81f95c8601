"""Decay functions f with computable tail thresholds.

Three families are supported:

* ``inv_poly:<alpha>``  f(R) = min(1, R^-alpha), alpha > 0 rational
* ``inv_log``           f(R) = min(1, 1/ln(e + R))
* ``step:[(R1,v1),(R2,v2),...]``  f = 1 below R1, v_i on [R_i, R_{i+1}), v_last beyond

All density decisions go through :meth:`FSpec.density_holds`, which is exact
for ``inv_poly`` and ``step`` and uses outward-rounded interval arithmetic
for ``inv_log``.
"""
from __future__ import annotations

import contextlib
import re
from dataclasses import dataclass
from fractions import Fraction

import mpmath
from mpmath import libmp

from .errors import ConfigError, ScaleBudgetExceeded
from .scale import Lin, Scale, as_fraction, dyadic_ceil, format_rational, le, parse_rational, rational_root, root_bounds


# thresholds beyond 2**MAX_SCALE_BITS are refused rather than computed
MAX_SCALE_BITS = 1 << 20


@dataclass(frozen=True)
class FSpec:
    family: str
    alpha: Fraction | None = None
    table: tuple[tuple[Fraction, Fraction], ...] = ()

    def __post_init__(self):
        if self.family == "inv_poly":
            if self.alpha is None or self.alpha <= 0:
                raise ConfigError("inv_poly needs alpha > 0")
        elif self.family == "step":
            if not self.table:
                raise ConfigError("step table must be non-empty")
            rs = [r for r, _ in self.table]
            vs = [v for _, v in self.table]
            if any(r <= 0 for r in rs) or any(a >= b for a, b in zip(rs, rs[1:])):
                raise ConfigError("step table breakpoints must be positive and strictly increasing")
            if any(not (0 <= v <= 1) for v in vs) or any(a < b for a, b in zip(vs, vs[1:])):
                raise ConfigError("step table values must lie in [0, 1] and be non-increasing")
        elif self.family != "inv_log":
            raise ConfigError(f"unknown decay family {self.family!r}")

    @classmethod
    def parse(cls, text: str) -> "FSpec":
        t = text.strip().replace(" ", "")
        try:
            if t.startswith("inv_poly:"):
                return cls("inv_poly", alpha=parse_rational(t[9:]))
            if t == "inv_log":
                return cls("inv_log")
            if t.startswith("step:") or t.startswith("step_table:"):
                body = t.split(":", 1)[1]
                pairs = re.findall(r"\(([^(),]+),([^(),]+)\)", body)
                if not pairs:
                    raise ConfigError(f"malformed step table {text!r}")
                return cls("step", table=tuple((parse_rational(a), parse_rational(b)) for a, b in pairs))
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        raise ConfigError(f"unknown decay function {text!r}")

    @classmethod
    def step(cls, pairs):
        return cls("step", table=tuple((as_fraction(a), as_fraction(b)) for a, b in pairs))

    @property
    def text(self) -> str:
        if self.family == "inv_poly":
            return "inv_poly:" + format_rational(self.alpha)
        if self.family == "inv_log":
            return "inv_log"
        return "step:[" + ",".join(f"({format_rational(r)},{format_rational(v)})" for r, v in self.table) + "]"

    def tends_to_zero(self) -> bool:
        return self.family != "step" or self.table[-1][1] == 0

    # -- evaluation --

    def _step_value(self, R: Scale) -> Fraction:
        val = Fraction(1)
        for r, v in self.table:
            if le(r, R):
                val = v
        return val

    def __call__(self, R) -> float:
        """Float value, for reports."""
        R = R if isinstance(R, Scale) else Scale.rat(as_fraction(R))
        x = float(R)
        if self.family == "inv_poly":
            return min(1.0, x ** -float(self.alpha)) if x > 0 else 1.0
        if self.family == "inv_log":
            return min(1.0, 1.0 / float(mpmath.log(mpmath.e + x)))
        return float(self._step_value(R))

    def threshold(self, delta) -> Scale:
        """Least supported T with f(R) <= delta for every R >= T (rounded up)."""
        delta = as_fraction(delta)
        if delta <= 0:
            raise ConfigError("threshold needs delta > 0: f never reaches 0 at a finite scale")
        if delta >= 1:
            return Scale.rat(0)
        if self.family == "inv_poly":
            p, q = self.alpha.numerator, self.alpha.denominator
            if (delta.denominator.bit_length() - delta.numerator.bit_length()) * q > MAX_SCALE_BITS * p:
                raise ScaleBudgetExceeded(f"{self.text}: threshold for delta={format_rational(delta)} "
                                          f"exceeds 2^{MAX_SCALE_BITS}")
            x = (1 / delta) ** q
            exact = rational_root(x, p)
            return Scale.rat(exact if exact is not None else dyadic_ceil(root_bounds(x, p)[1]))
        if self.family == "inv_log":
            # T ~ e^(1/delta) has about 1.44/delta bits
            if delta.denominator > delta.numerator * (MAX_SCALE_BITS // 2):
                raise ScaleBudgetExceeded(f"inv_log: threshold for delta={format_rational(delta)} "
                                          f"exceeds 2^{MAX_SCALE_BITS}")
            with _iv_prec(128):
                iv = mpmath.iv
                t = iv.exp(iv.mpf(delta.denominator) / delta.numerator) - iv.e
                hi = _endpoint(t, 1)
            return Scale.rat(max(dyadic_ceil(hi), Fraction(0)))
        for r, v in self.table:
            if v <= delta:
                return Scale.rat(r)
        raise ConfigError(f"{self.text} never drops to {delta}: threshold unreachable")

    def density_holds(self, lhs: Fraction, R: Scale, d: int) -> bool:
        """Decide lhs >= f(R) * R^d, exactly where possible, soundly otherwise."""
        lhs = as_fraction(lhs)
        if self.family == "step":
            return le(self._step_value(R) * _power(R, d), Lin(lhs))
        if self.family == "inv_poly":
            if R.square <= 1:
                return le(_power(R, d), Lin(lhs))
            # lhs >= R^(d - alpha)  <=>  lhs^(2q) >= (R^2)^(dq - p)
            p, q = self.alpha.numerator, self.alpha.denominator
            e = d * q - p
            K = R.square
            if e >= 0:
                return lhs ** (2 * q) >= K ** e
            return lhs ** (2 * q) * K ** (-e) >= 1
        return lhs >= self.upper_bound(R) * _power_upper(R, d)

    def upper_bound(self, R: Scale) -> Fraction:
        """A rational upper bound on f(R)."""
        if self.family == "step":
            return self._step_value(R)
        if self.family == "inv_poly":
            if R.square <= 1:
                return Fraction(1)
            p, q = self.alpha.numerator, self.alpha.denominator
            # R^-alpha = (R^2)^(-p/(2q))
            return 1 / root_bounds(R.square ** p, 2 * q, 64)[0]
        if R.square == 0:
            return Fraction(1)
        lo_R = R.bounds(96)[0]
        with _iv_prec(160):
            iv = mpmath.iv
            lo_ln = _endpoint(iv.log(iv.e + iv.mpf(lo_R.numerator) / lo_R.denominator), 0)
        return min(Fraction(1), dyadic_ceil(1 / lo_ln, 64)) if lo_ln > 0 else Fraction(1)


@contextlib.contextmanager
def _iv_prec(bits):
    old = mpmath.iv.prec
    mpmath.iv.prec = bits
    try:
        yield
    finally:
        mpmath.iv.prec = old


def _endpoint(x, which: int) -> Fraction:
    """Exact rational value of an interval endpoint (0 lower, 1 upper)."""
    man, exp = libmp.to_man_exp(x._mpi_[which])
    return Fraction(int(man)) * Fraction(2) ** int(exp)


def _power(R: Scale, d: int) -> Lin:
    """R^d exactly as a Lin."""
    K = R.square
    if d % 2 == 0:
        return Lin(K ** (d // 2))
    return Lin(0, {K: K ** (d // 2)}) if not R.rational else Lin(R.value ** d)


def _power_upper(R: Scale, d: int) -> Fraction:
    return (R.value ** d) if R.rational else root_bounds(R.square ** d, 2, 64)[1]
