"""Randomized evidence about a built set, independent of the construction logic.

Sampling here is evidence, not proof: conclusion (i) holds over all of
A x A, and only :mod:`distavoid.certify` establishes that.  The oracle
checks that what the manifest describes behaves as claimed on random
points.

Points are handled as integer vectors scaled by ``2**S`` so that pair
distances stay exact even when block coordinates run far beyond float
precision.  Margins are reported as floats rounded toward zero from exact
rational lower bounds.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import ConfigError
from .model import ConstructionManifest
from .norms import NormSpec, compare_norm_to, eval_norm, norm_values
from .scale import Lin, Scale, as_fraction, lt

REJECTION_LIMIT = 10_000


@dataclass(frozen=True)
class SamplerConfig:
    seed: int = 0
    samples: int = 10_000
    stage: int | None = None

    def split(self, k: int) -> list["SamplerConfig"]:
        """Independent per-worker configs; merging results by min/sum is deterministic."""
        seqs = np.random.SeedSequence(self.seed).spawn(k)
        per = [self.samples // k + (i < self.samples % k) for i in range(k)]
        return [SamplerConfig(int(s.generate_state(1, np.uint64)[0]), c, self.stage) for s, c in zip(seqs, per)]


def _float_down(x: Fraction) -> float:
    f = float(x)
    return f if Fraction(f) <= x else math.nextafter(f, -math.inf)


# -- exact norms on scaled integer vectors ---------------------------------

class _ScaledNorm:
    """rho on integer vectors X standing for X / 2**S."""

    def __init__(self, norm: NormSpec, S: int):
        if not norm.exact:
            raise ConfigError(f"{norm} has no exact evaluation")
        self.norm, self.S = norm, S
        self.l2 = norm.kind == "l2"
        self.D = 1 if self.l2 else norm.value_denominator
        self.rows = norm.integer_rows() if norm.kind == "poly" else None

    def key(self, X) -> int:
        """||X||^2 for l2, otherwise D * 2**S * rho(X / 2**S)."""
        k = self.norm.kind
        if k == "l2":
            return sum(x * x for x in X)
        if k == "l1":
            return sum(abs(x) for x in X)
        if k == "linf":
            return max(abs(x) for x in X)
        return max(abs(sum(a * x for a, x in zip(row, X))) for row in self.rows)

    def below(self, X, r: Fraction) -> bool:
        """rho(X / 2**S) < r exactly."""
        r = as_fraction(r)
        key = self.key(X)
        if self.l2:
            return key * r.denominator ** 2 < r.numerator ** 2 << (2 * self.S)
        return key * r.denominator < (r.numerator * self.D) << self.S

    def margin(self, X, R: Scale) -> tuple[int, int]:
        """(num, den) with num/den <= |rho(X / 2**S) - R|."""
        S = self.S
        key = self.key(X)
        if self.l2:
            p, q = R.square.numerator, R.square.denominator
            num = abs(key * q - (p << (2 * S)))
            # |rho - R| = |rho^2 - R^2| / (rho + R), with rho + R bounded above on the 2**-S grid
            den = q * (math.isqrt(key) + 1 + math.isqrt((p << (2 * S)) // q) + 1) << S
            return num, den
        if R.rational:
            a, b = R.value.numerator, R.value.denominator
            return abs(key * b - ((a * self.D) << S)), (b * self.D) << S
        lo, hi = (Lin(Fraction(key, self.D << S)) - R.lin()).bounds(S + 64)
        m = max(lo, -hi, Fraction(0))
        return m.numerator, m.denominator


def _scale_bits(m: ConstructionManifest) -> int:
    rmin = min(st.ball_radius for st in m.stages)
    extra = max(0, math.ceil(math.log2(1 / m.equivalence.c_lo)))
    return 24 + max(0, math.ceil(math.log2(1 / rmin))) + extra


def _ball_offset(sn: _ScaledNorm, r: Fraction, c_lo: Fraction, rng: random.Random):
    """Uniform point of the 2**-S grid inside the open rho-ball of radius r."""
    B = math.floor(r / c_lo * (1 << sn.S))
    d = sn.norm.dim
    for _ in range(REJECTION_LIMIT):
        o = tuple(rng.randint(-B, B) for _ in range(d))
        if sn.below(o, r):
            return o
    raise ConfigError(f"rejection sampling exceeded {REJECTION_LIMIT} tries")


def _sample_scaled(m: ConstructionManifest, n: int, sn: _ScaledNorm, rng: random.Random):
    st = m.stage(n)
    center = tuple(a + rng.randint(0, st.side) for a in st.anchor)
    off = _ball_offset(sn, st.ball_radius, m.equivalence.c_lo, rng)
    return tuple((c << sn.S) + o for c, o in zip(center, off))


# -- membership and sampling -----------------------------------------------

def contains(m: ConstructionManifest, y) -> bool:
    """Exact membership of the rational point y in the union of the blocks."""
    y = [as_fraction(c) for c in y]
    if len(y) != m.dim:
        raise ConfigError(f"point of dimension {len(y)} for a {m.dim}-dimensional manifest")
    for st in m.stages:
        if _stage_contains(m, st, y):
            return True
    return False


def _stage_contains(m, st, y) -> bool:
    r = st.ball_radius
    reach = r / m.equivalence.c_lo
    ranges = []
    for yi, a in zip(y, st.anchor):
        lo = max(math.ceil(yi - reach), a)
        hi = min(math.floor(yi + reach), a + st.side)
        if lo > hi:
            return False
        ranges.append(range(lo, hi + 1))
    t = Scale.rat(r)
    for x in itertools.product(*ranges):
        if compare_norm_to(m.norm, [xi - yi for xi, yi in zip(x, y)], t) < 0:
            return True
    return False


def sample_point(m: ConstructionManifest, n: int, config: SamplerConfig | None = None,
                 rng: random.Random | None = None) -> tuple[Fraction, ...]:
    """A point of block n: uniform center, then a uniform offset in its ball."""
    m.stage(n)
    if rng is None:
        rng = random.Random((config or SamplerConfig()).seed)
    sn = _ScaledNorm(m.norm, _scale_bits(m))
    X = _sample_scaled(m, n, sn, rng)
    return tuple(Fraction(x, 1 << sn.S) for x in X)


def sample_points(m: ConstructionManifest, config: SamplerConfig) -> list[tuple[Fraction, ...]]:
    rng = random.Random(config.seed)
    sn = _ScaledNorm(m.norm, _scale_bits(m))
    out = []
    for _ in range(config.samples):
        n = config.stage or rng.randint(1, len(m.stages))
        X = _sample_scaled(m, n, sn, rng)
        out.append(tuple(Fraction(x, 1 << sn.S) for x in X))
    return out


# -- pair margins ----------------------------------------------------------

@dataclass(frozen=True)
class MarginReport:
    pairs: int
    overall: float
    intra: dict = field(default_factory=dict)  # stage -> min margin over intra-block pairs
    cross: float = math.inf
    predicted: dict = field(default_factory=dict)  # stage -> eps_{n-1}/2

    def holds(self, tol: float = 1e-9) -> bool:
        return all(self.intra[n] >= float(self.predicted[n]) - tol for n in self.intra)


class _MinFrac:
    def __init__(self):
        self.num, self.den = None, 1

    def add(self, num, den):
        if self.num is None or num * self.den < self.num * den:
            self.num, self.den = num, den

    def value(self) -> float:
        return math.inf if self.num is None else _float_down(Fraction(self.num, self.den))


def pair_margin(m: ConstructionManifest, config: SamplerConfig) -> MarginReport:
    """Minimum over sampled pairs of min_j |rho(x - y) - R_j|, rounded down.

    With a stage filter both points come from that block.  Otherwise the
    first point picks a block at random and the second reuses it half the
    time, so both intra- and cross-block pairs are covered.
    """
    if config.samples <= 0:
        raise ConfigError("pair_margin needs a positive sample count")
    rng = random.Random(config.seed)
    sn = _ScaledNorm(m.norm, _scale_bits(m))
    N = len(m.stages)
    if config.stage is not None:
        m.stage(config.stage)
    Rs = [st.R for st in m.stages]
    overall, cross = _MinFrac(), _MinFrac()
    intra = {}
    for _ in range(config.samples):
        if config.stage is not None:
            a = b = config.stage
        else:
            a = rng.randint(1, N)
            b = a if rng.random() < 0.5 else rng.randint(1, N)
        X = _sample_scaled(m, a, sn, rng)
        Y = _sample_scaled(m, b, sn, rng)
        diff = tuple(x - y for x, y in zip(X, Y))
        best = _MinFrac()
        for R in Rs:
            best.add(*sn.margin(diff, R))
        overall.add(best.num, best.den)
        if a == b:
            intra.setdefault(a, _MinFrac()).add(best.num, best.den)
        else:
            cross.add(best.num, best.den)
    return MarginReport(config.samples, overall.value(), {n: v.value() for n, v in sorted(intra.items())},
                        cross.value(), {st.n: st.eps_prev / 2 for st in m.stages})


# -- density ---------------------------------------------------------------

@dataclass(frozen=True)
class DensityEstimate:
    n: int
    samples: int
    hits: int
    estimate: float
    stderr: float
    exact: Fraction | None
    exact_value: float
    f_bound: float

    @property
    def z(self) -> float:
        return abs(self.estimate - self.exact_value) / self.stderr if self.stderr > 0 else math.inf

    @property
    def within(self) -> bool:
        return self.z <= 4

    @property
    def above_f(self) -> bool:
        return self.estimate > self.f_bound


def exact_density(m: ConstructionManifest, n: int):
    """mu(A within R_n) / mu(B_{R_n}) for the built prefix, with omega cancelled.

    Blocks m <= n lie inside B_{R_n}; later blocks lie beyond 10 R_n.
    Returns ``(fraction or None, float)``; the fraction is None when R_n^d
    is irrational.
    """
    st = m.stage(n)
    d = m.dim
    mass = sum(s.ball_count * s.ball_radius ** d for s in m.stages[:n])
    if st.R.rational:
        q = mass / st.R.value ** d
        return q, float(q)
    if d % 2 == 0:
        q = mass / st.R.square ** (d // 2)
        return q, float(q)
    return None, float(mass) / float(st.R) ** d


def _float_contains(m, pts: np.ndarray, stages) -> np.ndarray:
    """Vectorized membership with an exact fallback near ball boundaries."""
    hit = np.zeros(len(pts), dtype=bool)
    d = m.dim
    for st in stages:
        r = float(st.ball_radius)
        reach = math.ceil(st.ball_radius / m.equivalence.c_lo)
        lo = np.array(st.anchor, dtype=float)
        hi = lo + st.side
        near = np.all((pts >= lo - reach) & (pts <= hi + reach), axis=1)
        idx = np.nonzero(near & ~hit)[0]
        if not len(idx):
            continue
        sub = pts[idx]
        base = np.floor(sub)
        for off in itertools.product(range(-reach, reach + 2), repeat=d):
            cand = base + np.array(off, dtype=float)
            inbox = np.all((cand >= lo) & (cand <= hi), axis=1)
            dist = norm_values(m.norm, sub - cand)
            tol = 1e-9 * max(r, 1e-300)
            inside = inbox & (dist < r - tol)
            hit[idx[inside]] = True
            amb = np.nonzero(inbox & (np.abs(dist - r) <= tol))[0]
            for i in amb:
                y = [Fraction(float(c)) for c in sub[i]]
                if _stage_contains(m, st, y):
                    hit[idx[i]] = True
    return hit


def mc_density(m: ConstructionManifest, n: int, config: SamplerConfig, batch: int = 1 << 18) -> DensityEstimate:
    """Monte Carlo estimate of the density of A in the rho-ball of radius R_n."""
    st = m.stage(n)
    if config.samples <= 0:
        raise ConfigError("mc_density needs a positive sample count")
    R = float(st.R)
    half = R / float(m.equivalence.c_lo)
    spacing = math.ulp(half)
    if any(spacing > float(s.ball_radius) * 2 ** -10 for s in m.stages[:n]):
        raise ConfigError(f"stage {n}: float spacing {spacing:.3g} is too coarse for the ball radii; "
                          "Monte Carlo density is limited to stages where R_n * 2^-52 << eps_{n-1}")
    rng = np.random.default_rng(config.seed)
    d = m.dim
    got = hits = 0
    while got < config.samples:
        pts = rng.uniform(-half, half, size=(batch, d))
        pts = pts[norm_values(m.norm, pts) < R][: config.samples - got]
        got += len(pts)
        hits += int(np.count_nonzero(_float_contains(m, pts, m.stages)))
    p = hits / got
    se = math.sqrt(p * (1 - p) / got)
    q, qf = exact_density(m, n)
    return DensityEstimate(n, got, hits, p, se, q, qf, m.f(st.R))


# -- the thickened lattice -------------------------------------------------

@dataclass(frozen=True)
class DemoReport:
    norm: str
    dim: int
    thickening: Fraction
    pairs: int
    min_half_distance: float
    bound: Fraction
    cell_density: Fraction

    @property
    def ok(self) -> bool:
        return self.min_half_distance >= float(self.bound) - 1e-12


def thickened_lattice_demo(norm: NormSpec, thickening, config: SamplerConfig, window: int = 20) -> DemoReport:
    """Z^d thickened by rho-balls of radius t: distances stay within 2t of integers.

    For l1 and linf every lattice difference has integer norm, so sampled
    distances keep at least 1/2 - 2t away from each half-integer.  The
    density per unit cell is the ball volume: (2t)^d for linf, (2t)^d/d!
    for l1.
    """
    t = as_fraction(thickening)
    if norm.kind not in ("l1", "linf"):
        raise ConfigError("the thickened-lattice demo is defined for l1 and linf only")
    if not 0 < t < Fraction(1, 4):
        raise ConfigError(f"thickening {t} must lie in (0, 1/4); at 1/4 the half-integer claim fails")
    if config.samples <= 0:
        raise ConfigError("demo needs a positive sample count")
    d = norm.dim
    S = 24 + math.ceil(math.log2(1 / t))
    sn = _ScaledNorm(norm, S)
    rng = random.Random(config.seed)

    def point():
        c = [rng.randint(-window, window) for _ in range(d)]
        o = _ball_offset(sn, t, Fraction(1), rng)  # both balls sit in [-t, t]^d
        return [(ci << S) + oi for ci, oi in zip(c, o)]

    best = None
    unit = 1 << S
    for _ in range(config.samples):
        diff = [x - y for x, y in zip(point(), point())]
        key = sn.key(diff)  # rho * 2**S
        # distance to the nearest half-integer, in units of 2**-S
        k = (key - unit // 2) // unit
        dist = min(abs(key - (k * unit + unit // 2)), abs(key - ((k + 1) * unit + unit // 2)))
        best = dist if best is None else min(best, dist)
    cell = (2 * t) ** d
    if norm.kind == "l1":
        cell /= math.factorial(d)
    return DemoReport(norm.text, d, t, config.samples, _float_down(Fraction(best, unit)), Fraction(1, 2) - 2 * t, cell)


# -- exhaustive small-scale falsifier --------------------------------------

@dataclass(frozen=True)
class BruteResult:
    passed: bool
    vectors: int
    violation: tuple | None = None


def brute_pair_check(m: ConstructionManifest, n: int | None = None, budget: int = 2_000_000) -> BruteResult:
    """Check every difference of ball centers involving block n against every R_j.

    A difference u - v with rho(u - v) within 2r of some R_j is reported,
    where r is the larger of the two blocks' ball radii; by the triangle
    inequality no such difference means no pair of the two blocks hits R_j.
    Cross-block differences are included for earlier blocks.
    """
    stages = m.stages if n is None else [m.stage(n)]
    Rs = [(st.n, st.R) for st in m.stages]
    total = 0
    for st in stages:
        for other in m.stages[: st.n]:
            lo = [a - b - other.side for a, b in zip(st.anchor, other.anchor)]
            hi = [a + st.side - b for a, b in zip(st.anchor, other.anchor)]
            if other.n == st.n:
                lo = [-st.side] * m.dim
                hi = [st.side] * m.dim
            count = math.prod(h - l + 1 for l, h in zip(lo, hi))
            total += count
            if total > budget:
                raise ConfigError(f"brute pair check needs more than {budget} difference vectors")
            w = 2 * max(st.ball_radius, other.ball_radius)
            bad = _scan_box(m.norm, lo, hi, Rs, w)
            if bad is not None:
                return BruteResult(False, total, (st.n, other.n) + bad)
    return BruteResult(True, total)


def _scan_box(norm, lo, hi, Rs, w: Fraction):
    d = norm.dim
    axes = [np.arange(l, h + 1, dtype=float) for l, h in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    vals = norm_values(norm, grid)
    wf = float(w)
    for j, R in Rs:
        Rf = float(R)
        # float filter with generous slack; anything close is decided exactly
        close = np.nonzero(np.abs(vals - Rf) <= wf + 1e-9 * max(Rf, 1.0))[0]
        for i in close:
            v = tuple(int(c) for c in grid[i])
            val = eval_norm(norm, v).lin()
            if lt(val, R.lin() - w) or lt(R.lin() + w, val):
                continue
            return (j, v)
    return None
