"""Norms on R^d: exact evaluation, equivalence constants, unit-ball volumes.

Supported kinds are ``l1``, ``l2``, ``linf``, general ``lp`` with rational
``p`` (enclosures only), and symmetric polytope norms
``rho(x) = max_i |a_i . x|`` with rational functionals.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConfigError, NonExactNormError
from .scale import (
    Lin,
    Scale,
    as_fraction,
    dyadic_ceil,
    dyadic_floor,
    format_rational,
    parse_rational,
    root_bounds,
)

EXACT_KINDS = ("l1", "l2", "linf", "poly")


@dataclass(frozen=True)
class NormSpec:
    dim: int
    kind: str
    p: Fraction | None = None
    functionals: tuple[tuple[Fraction, ...], ...] = ()

    def __post_init__(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise ConfigError(f"dimension must be a positive integer, got {self.dim!r}")
        if self.kind not in ("l1", "l2", "linf", "lp", "poly"):
            raise ConfigError(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or self.p < 1:
                raise ConfigError("lp norms need p >= 1")
        if self.kind == "poly":
            if not self.functionals:
                raise ConfigError("polytope norm needs at least one functional")
            for a in self.functionals:
                if len(a) != self.dim:
                    raise ConfigError(f"functional {a} has wrong length for dim {self.dim}")
            if _rank(self.functionals) < self.dim:
                raise ConfigError("polytope functionals do not span R^d (degenerate norm)")

    # -- construction helpers --

    @classmethod
    def l1(cls, dim):
        return cls(dim, "l1")

    @classmethod
    def l2(cls, dim):
        return cls(dim, "l2")

    @classmethod
    def linf(cls, dim):
        return cls(dim, "linf")

    @classmethod
    def lp(cls, dim, p):
        p = as_fraction(p)
        if p == 1:
            return cls(dim, "l1")
        if p == 2:
            return cls(dim, "l2")
        return cls(dim, "lp", p=p)

    @classmethod
    def poly(cls, functionals: Sequence[Sequence]):
        rows = tuple(tuple(as_fraction(c) for c in a) for a in functionals)
        if not rows:
            raise ConfigError("polytope norm needs at least one functional")
        return cls(len(rows[0]), "poly", functionals=rows)

    @classmethod
    def parse(cls, text: str, dim: int) -> "NormSpec":
        """Parse ``l1``, ``l2``, ``linf``, ``lp:<p>`` or ``poly:[(..),(..)]``."""
        t = text.strip().replace(" ", "")
        if t in ("l1", "l2", "linf"):
            return cls(dim, t)
        if t.startswith("lp:"):
            try:
                p = parse_rational(t[3:])
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            return cls.lp(dim, p)
        if t.startswith("poly:"):
            body = t[5:]
            if not (body.startswith("[") and body.endswith("]")):
                raise ConfigError(f"malformed polytope norm {text!r}")
            rows = re.findall(r"\(([^()]*)\)", body[1:-1])
            if not rows or re.sub(r"\([^()]*\)|,", "", body[1:-1]):
                raise ConfigError(f"malformed polytope norm {text!r}")
            try:
                funcs = [[parse_rational(c) for c in r.split(",")] for r in rows]
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
            spec = cls.poly(funcs)
            if spec.dim != dim:
                raise ConfigError(f"polytope functionals have dimension {spec.dim}, expected {dim}")
            return spec
        raise ConfigError(f"unknown norm {text!r}")

    @property
    def text(self) -> str:
        if self.kind == "lp":
            return "lp:" + format_rational(self.p)
        if self.kind == "poly":
            rows = ",".join("(" + ",".join(format_rational(c) for c in a) + ")" for a in self.functionals)
            return f"poly:[{rows}]"
        return self.kind

    def __str__(self):
        return f"{self.text} (d={self.dim})"

    @property
    def exact(self) -> bool:
        return self.kind in EXACT_KINDS

    @property
    def value_denominator(self) -> int | None:
        """D such that rho(Z^d) lies in (1/D)Z, or None when values are irrational."""
        if self.kind in ("l1", "linf") or (self.kind == "l2" and self.dim == 1):
            return 1
        if self.kind == "poly":
            return math.lcm(*(c.denominator for a in self.functionals for c in a))
        return None

    def integer_rows(self) -> list[tuple[int, ...]]:
        """Functionals scaled by ``value_denominator`` (polytope norms only)."""
        D = self.value_denominator
        return [tuple(int(c * D) for c in a) for a in self.functionals]


def _rank(rows) -> int:
    m = [list(map(Fraction, r)) for r in rows]
    rank, cols = 0, len(m[0]) if m else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][c] != 0:
                f = m[i][c] / m[rank][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[rank])]
        rank += 1
    return rank


def _solve(a, b):
    """Exact solve of a square system; None if singular."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return None
        m[c], m[piv] = m[piv], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [row[-1] for row in m]


# -- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class Enclosure:
    """Guaranteed ``lo <= rho(x) <= hi`` for norms without exact evaluation."""

    lo: Fraction
    hi: Fraction
    exact: bool = False

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _check_dim(norm: NormSpec, x) -> list[Fraction]:
    if len(x) != norm.dim:
        raise ConfigError(f"vector of length {len(x)} does not match norm dimension {norm.dim}")
    return [as_fraction(c) for c in x]


def eval_norm(norm: NormSpec, x, width=Fraction(1, 2 ** 40)):
    """rho(x) as an exact :class:`Scale`, or an :class:`Enclosure` for general lp."""
    x = _check_dim(norm, x)
    k = norm.kind
    if k == "l1":
        return Scale.rat(sum(abs(c) for c in x))
    if k == "linf":
        return Scale.rat(max(abs(c) for c in x))
    if k == "l2":
        return Scale.sqrt(sum(c * c for c in x))
    if k == "poly":
        return Scale.rat(max(abs(sum(ai * xi for ai, xi in zip(a, x))) for a in norm.functionals))
    return _lp_enclosure(norm.p, x, as_fraction(width))


def _lp_enclosure(p: Fraction, x: list[Fraction], width: Fraction) -> Enclosure:
    # rho = (sum |x_i|^(m/n))^(n/m)
    m, n = p.numerator, p.denominator
    bits = 32
    while True:
        lo_s = hi_s = Fraction(0)
        for c in x:
            a, b = root_bounds(abs(c) ** m, n, bits)
            lo_s += a
            hi_s += b
        lo = root_bounds(lo_s ** n, m, bits)[0]
        hi = root_bounds(hi_s ** n, m, bits)[1]
        if hi - lo <= width:
            return Enclosure(lo, hi)
        bits *= 2


def compare_norm_to(norm: NormSpec, x, t: Scale) -> int:
    """Exact three-way comparison of rho(x) with t: -1 less, 0 equal, 1 greater."""
    if not norm.exact:
        raise NonExactNormError(f"{norm} has no exact evaluation; certification unavailable")
    v = eval_norm(norm, x)
    return (v > t) - (v < t)


# -- equivalence constants -------------------------------------------------

@dataclass(frozen=True)
class EquivalenceConstants:
    """Certified ``c_lo * |x|_2 <= rho(x) <= C_hi * |x|_2``."""

    c_lo: Fraction
    C_hi: Fraction

    def __post_init__(self):
        if not (0 < self.c_lo <= self.C_hi):
            raise ValueError(f"invalid equivalence constants ({self.c_lo}, {self.C_hi})")


def unit_ball_vertices(norm: NormSpec) -> list[tuple[Fraction, ...]]:
    """Vertices of {x : max_i |a_i . x| <= 1} by exact enumeration of active sets."""
    if norm.kind != "poly":
        raise ConfigError("vertices are only defined for polytope norms")
    d, rows = norm.dim, norm.functionals
    found = set()
    for idx in itertools.combinations(range(len(rows)), d):
        a = [rows[i] for i in idx]
        for signs in itertools.product((1, -1), repeat=d):
            x = _solve(a, [Fraction(s) for s in signs])
            if x is None:
                continue
            if all(abs(sum(ai * xi for ai, xi in zip(r, x))) <= 1 for r in rows):
                found.add(tuple(x))
    return sorted(found)


def equivalence_constants(norm: NormSpec) -> EquivalenceConstants:
    d, k = norm.dim, norm.kind
    one = Fraction(1)
    if k == "l2" or d == 1 and k != "poly":
        return EquivalenceConstants(one, one)
    if k == "l1":
        return EquivalenceConstants(one, dyadic_ceil(root_bounds(d, 2)[1]))
    if k == "linf":
        return EquivalenceConstants(dyadic_floor(root_bounds(Fraction(1, d), 2)[0]), one)
    if k == "lp":
        # |x|_p vs |x|_2 differ by at most d^(1/p - 1/2)
        p = norm.p
        e = abs(1 / p - Fraction(1, 2))
        bound = root_bounds(Fraction(d) ** e.numerator, e.denominator)
        if p < 2:
            return EquivalenceConstants(one, dyadic_ceil(bound[1]))
        return EquivalenceConstants(dyadic_floor(1 / bound[1]), one)
    # polytope: |a.x| <= |a|_2 |x|_2, and the unit ball sits inside the
    # Euclidean ball through its farthest vertex
    C = max(sum(c * c for c in a) for a in norm.functionals)
    R2 = max(sum(c * c for c in v) for v in unit_ball_vertices(norm))
    return EquivalenceConstants(
        dyadic_floor(1 / root_bounds(R2, 2)[1]),
        dyadic_ceil(root_bounds(C, 2)[1]),
    )


def coordinate_extents(norm: NormSpec) -> list[Fraction]:
    """h_i = max |x_i| over the closed unit ball, so rho(v) <= b implies |v_i| <= b*h_i."""
    if norm.kind == "poly":
        verts = unit_ball_vertices(norm)
        return [max(abs(v[i]) for v in verts) for i in range(norm.dim)]
    return [Fraction(1)] * norm.dim


def min_lattice_norm(norm: NormSpec) -> Scale:
    """Smallest rho(v) over nonzero integer vectors."""
    if not norm.exact:
        raise NonExactNormError(f"{norm} has no exact evaluation")
    consts = equivalence_constants(norm)
    e1 = [1] + [0] * (norm.dim - 1)
    radius = eval_norm(norm, e1).scaled(1 / consts.c_lo)
    bound = radius.floor()
    best = None
    for v in itertools.product(range(-bound, bound + 1), repeat=norm.dim):
        if not any(v) or sum(c * c for c in v) > radius.square:
            continue
        val = eval_norm(norm, v)
        if best is None or val < best:
            best = val
    return best


# -- volumes ---------------------------------------------------------------

@dataclass(frozen=True)
class VolumeEstimate:
    """Either ``coef * pi**pi_power`` exactly, or a Monte Carlo estimate."""

    kind: str
    coef: Fraction | None = None
    pi_power: int = 0
    estimate: float | None = None
    stderr: float | None = None
    lower: float | None = None
    confidence: float | None = None
    samples: int = 0

    @property
    def value(self) -> float:
        if self.kind == "exact":
            return float(self.coef) * math.pi ** self.pi_power
        return self.estimate

    def __str__(self):
        if self.kind == "exact":
            pi = "" if self.pi_power == 0 else (" pi" if self.pi_power == 1 else f" pi^{self.pi_power}")
            return format_rational(self.coef) + pi
        return f"{self.estimate:.6g} +/- {self.stderr:.2g} (lower {self.lower:.6g} @ {self.confidence})"


def _l2_ball_volume(d: int) -> tuple[Fraction, int]:
    m = d // 2
    if d % 2 == 0:
        return Fraction(1, math.factorial(m)), m
    # pi^(m+1/2) / Gamma(m+3/2); the sqrt(pi) factors cancel
    double_fact = math.prod(range(1, d + 1, 2))
    return Fraction(2 ** (m + 1), double_fact), m


def unit_ball_volume(norm: NormSpec, budget: int = 0, confidence: float = 0.95,
                     seed: int = 0, method: str = "auto") -> VolumeEstimate:
    """omega_rho = mu(B_1).  Closed forms for l1, l2, linf; Monte Carlo otherwise."""
    d = norm.dim
    if method == "auto" and norm.kind in ("l1", "l2", "linf"):
        if norm.kind == "l1":
            return VolumeEstimate("exact", Fraction(2 ** d, math.factorial(d)))
        if norm.kind == "linf":
            return VolumeEstimate("exact", Fraction(2 ** d))
        coef, k = _l2_ball_volume(d)
        return VolumeEstimate("exact", coef, k)
    if budget <= 0:
        raise ConfigError(f"no closed form for the unit ball of {norm}; a positive sample budget is required")
    from scipy.stats import beta

    half = 1 / float(equivalence_constants(norm).c_lo)
    rng = np.random.default_rng(seed)
    hits, left = 0, budget
    while left:
        n = min(left, 1 << 18)
        pts = rng.uniform(-half, half, size=(n, d))
        hits += int(np.count_nonzero(norm_values(norm, pts) < 1.0))
        left -= n
    box = (2 * half) ** d
    phat = hits / budget
    se = math.sqrt(phat * (1 - phat) / budget) * box
    lower = beta.ppf(1 - confidence, hits, budget - hits + 1) * box if hits else 0.0
    return VolumeEstimate("statistical", estimate=phat * box, stderr=se, lower=float(lower),
                          confidence=confidence, samples=budget)


# -- floating point evaluation ---------------------------------------------

def norm_values(norm: NormSpec, pts) -> np.ndarray:
    """Plain float evaluation on an (n, d) array.  Estimates only."""
    pts = np.asarray(pts, dtype=float)
    k = norm.kind
    if k == "l1":
        return np.abs(pts).sum(axis=1)
    if k == "l2":
        return np.sqrt((pts * pts).sum(axis=1))
    if k == "linf":
        return np.abs(pts).max(axis=1)
    if k == "lp":
        p = float(norm.p)
        return (np.abs(pts) ** p).sum(axis=1) ** (1 / p)
    a = np.array([[float(c) for c in row] for row in norm.functionals])
    return np.abs(pts @ a.T).max(axis=1)


def _down(x):
    return np.nextafter(x, -np.inf)


def _up(x):
    return np.nextafter(x, np.inf)


def _iabs(lo, hi):
    alo = np.where(lo >= 0, lo, np.where(hi <= 0, -hi, 0.0))
    ahi = np.maximum(np.abs(lo), np.abs(hi))
    return alo, ahi


def _imul(lo, hi, c_lo, c_hi):
    cands = np.stack([lo * c_lo, lo * c_hi, hi * c_lo, hi * c_hi])
    return _down(cands.min(axis=0)), _up(cands.max(axis=0))


def norm_enclosure(norm: NormSpec, lo, hi) -> tuple[np.ndarray, np.ndarray]:
    """Outward-rounded enclosure of rho over coordinate boxes [lo, hi] (shape (n, d))."""
    lo, hi = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
    alo, ahi = _iabs(lo, hi)
    k = norm.kind
    if k == "linf":
        return alo.max(axis=1), ahi.max(axis=1)
    if k in ("l1", "l2", "lp"):
        if k == "l2":
            alo, ahi = _down(alo * alo), _up(ahi * ahi)
        elif k == "lp":
            p = float(norm.p)
            alo, ahi = _down(alo ** p * (1 - 1e-14)), _up(ahi ** p * (1 + 1e-14))
        slo, shi = np.zeros(len(lo)), np.zeros(len(lo))
        for i in range(norm.dim):
            slo, shi = _down(slo + alo[:, i]), _up(shi + ahi[:, i])
        if k == "l2":
            return np.maximum(_down(np.sqrt(slo)), 0.0), _up(np.sqrt(shi))
        if k == "lp":
            p = float(norm.p)
            return _down(slo ** (1 / p) * (1 - 1e-14)), _up(shi ** (1 / p) * (1 + 1e-14))
        return slo, shi
    best_lo = np.zeros(len(lo))
    best_hi = np.zeros(len(lo))
    for row in norm.functionals:
        slo, shi = np.zeros(len(lo)), np.zeros(len(lo))
        for i, c in enumerate(row):
            fc = float(c)
            c_lo = fc if Fraction(fc) <= c else float(_down(fc))
            c_hi = fc if Fraction(fc) >= c else float(_up(fc))
            plo, phi = _imul(lo[:, i], hi[:, i], c_lo, c_hi)
            slo, shi = _down(slo + plo), _up(shi + phi)
        tlo, thi = _iabs(slo, shi)
        best_lo, best_hi = np.maximum(best_lo, tlo), np.maximum(best_hi, thi)
    return best_lo, best_hi


def scale_enclosure(x) -> tuple[float, float]:
    """Float bounds on a Scale / Lin / rational."""
    lo, hi = Lin.of(x).bounds(80)
    flo, fhi = float(lo), float(hi)
    if Fraction(flo) > lo:
        flo = float(_down(flo))
    if Fraction(fhi) < hi:
        fhi = float(_up(fhi))
    return flo, fhi
