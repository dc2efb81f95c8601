"""Independent, manifest-only re-verification of a construction.

Nothing here calls into :mod:`distavoid.builder`.  Every inequality the
avoidance and density arguments rely on is re-checked exactly from the
numbers stored in the manifest:

==========================  ==================================================
gap_a                       no lattice value within eps_n of R_j, j <= n
growth_b                    R_n >= 100 R_{n-1}
density_c                   N_n r_n^d >= f(R_n) R_n^d  (omega cancelled)
cube_fit                    rho(vertex) + r_n < R_n / 2
ball_disjoint               2 r_n <= s_min
inner_exclusion             c_lo |q|_2 >= 10 R_{n-1} + r_n
cross_block_separation      no R_j between blocks m < n
avoidance_margin            intra-block pairs stay away from every R_j
==========================  ==================================================

Stage 0 carries two global checks: ``constants`` and ``structure``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .arith import DEFAULT_FACTOR_BUDGET
from .decay import _power_upper
from .errors import BudgetExceeded, ConfigError, DistAvoidError
from .model import CertSummary, ConstructionManifest, Stage
from .norms import equivalence_constants, eval_norm, min_lattice_norm, unit_ball_volume
from .scale import Lin, Scale, format_rational, le, lt, unlimited_int_digits
from .spectrum import DEFAULT_ENUM_BUDGET, interval_hits

STAGE_CHECKS = ("gap_a", "growth_b", "density_c", "cube_fit", "ball_disjoint",
                "inner_exclusion", "cross_block_separation", "avoidance_margin")
GLOBAL_CHECKS = ("constants", "structure")


@dataclass(frozen=True)
class CheckResult:
    stage: int
    name: str
    passed: bool
    detail: str = ""
    evidence: dict = field(default_factory=dict, compare=False)

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        where = "global" if self.stage == 0 else f"stage {self.stage}"
        return f"{tag} {where:>8} {self.name:<24} {self.detail}"


@dataclass(frozen=True)
class DensityStage:
    n: int
    passed: bool
    lhs: Fraction  # N_n * r_n^d
    rhs_upper: Fraction  # rational upper bound on f(R_n) R_n^d
    slack: float
    volume_P: float
    volume_ball: float
    omega_kind: str


@dataclass(frozen=True)
class CertReport:
    results: tuple[CheckResult, ...]
    density: tuple[DensityStage, ...] = ()
    margins: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def status(self) -> str:
        return "certified" if self.ok else "failed"

    def failures(self):
        return [r for r in self.results if not r.passed]

    def failure_lines(self) -> list[str]:
        return [r.line() for r in self.failures()]

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]

    def get(self, stage: int, name: str) -> CheckResult:
        for r in self.results:
            if r.stage == stage and r.name == name:
                return r
        raise KeyError((stage, name))

    def summary(self) -> CertSummary:
        return CertSummary(self.status, tuple((r.stage, r.name, r.passed, r.detail) for r in self.results))


# -- global checks ---------------------------------------------------------

def check_constants(m: ConstructionManifest) -> CheckResult:
    """Stored constants must be at least as conservative as freshly derived ones."""
    if not m.norm.exact:
        return CheckResult(0, "constants", False, f"{m.norm} has no exact evaluation")
    ref = equivalence_constants(m.norm)
    s_ref = min_lattice_norm(m.norm)
    problems = []
    if not 0 < m.equivalence.c_lo <= ref.c_lo:
        problems.append(f"c_lo {format_rational(m.equivalence.c_lo)} not in (0, {format_rational(ref.c_lo)}]")
    if m.equivalence.C_hi < ref.C_hi:
        problems.append(f"C_hi {format_rational(m.equivalence.C_hi)} < {format_rational(ref.C_hi)}")
    if not (0 < m.s_min.square and m.s_min <= s_ref):
        problems.append(f"s_min {m.s_min} exceeds the true minimum {s_ref}")
    if not 0 < m.eps0 <= 1:
        problems.append(f"eps0 {format_rational(m.eps0)} outside (0, 1]")
    detail = "; ".join(problems) or f"c_lo={format_rational(m.equivalence.c_lo)} C_hi={format_rational(m.equivalence.C_hi)} s_min={m.s_min}"
    return CheckResult(0, "constants", not problems, detail)


def check_structure(m: ConstructionManifest) -> CheckResult:
    problems = []
    if m.norm.dim != m.dim:
        problems.append("norm dimension differs from manifest dimension")
    if not m.stages:
        problems.append("no stages")
    prev_eps = m.eps0
    for i, st in enumerate(m.stages, start=1):
        tag = f"stage {i}:"
        if st.n != i:
            problems.append(f"{tag} index {st.n} out of sequence")
        if len(st.anchor) != m.dim:
            problems.append(f"{tag} anchor has wrong dimension")
        if st.side < 0:
            problems.append(f"{tag} negative side")
        if st.eps_prev != prev_eps:
            problems.append(f"{tag} eps_prev {format_rational(st.eps_prev)} != eps_{i - 1} {format_rational(prev_eps)}")
        if st.ball_radius != st.eps_prev / 4:
            problems.append(f"{tag} ball radius {format_rational(st.ball_radius)} != eps_prev/4")
        if st.ball_count != (st.side + 1) ** m.dim:
            problems.append(f"{tag} ball count {st.ball_count} != (side+1)^d")
        if not 0 < st.eps <= st.eps_prev:
            problems.append(f"{tag} eps not in (0, eps_prev]")
        if st.eps > st.gap.eps:
            problems.append(f"{tag} eps exceeds its gap certificate width")
        if st.gap.R != st.R:
            problems.append(f"{tag} gap certificate is for {st.gap.R}, not R={st.R}")
        prev_eps = st.eps
    return CheckResult(0, "structure", not problems, "; ".join(problems) or f"{len(m.stages)} stages")


# -- per-stage checks ------------------------------------------------------

def check_condition_a(m: ConstructionManifest, n: int, deep: bool = False,
                      enum_budget: int = DEFAULT_ENUM_BUDGET,
                      factor_budget: int = DEFAULT_FACTOR_BUDGET) -> CheckResult:
    """|rho(v) - R_j| > eps_n for every lattice v and every j <= n."""
    st = m.stage(n)
    w = st.eps
    if w <= 0:
        return CheckResult(n, "gap_a", False, "nonpositive eps")
    checked = []
    for j in range(1, n + 1):
        sj = m.stage(j)
        if not lt(w, sj.R):
            return CheckResult(n, "gap_a", False, f"R_{j} - eps_{n} <= 0")
        try:
            hits = interval_hits(m.norm, sj.R, w, closed=True, witnesses=sj.gap.witness_map, deep=deep,
                                 enum_budget=enum_budget, factor_budget=factor_budget)
        except BudgetExceeded as exc:
            return CheckResult(n, "gap_a", False, f"budget exceeded re-verifying R_{j}: {exc}")
        if hits:
            value, vec = hits[0]
            return CheckResult(n, "gap_a", False,
                               f"lattice value {value} (v={vec}) within {format_rational(w)} of R_{j}={sj.R}",
                               {"j": j, "value": value, "vector": vec})
        checked.append(j)
    return CheckResult(n, "gap_a", True, f"width {format_rational(w)} clear around R_1..R_{n}",
                       {"checked": tuple(checked)})


def check_growth(m: ConstructionManifest) -> list[CheckResult]:
    out = []
    for st in m.stages:
        prev = m.R_prev(st.n)
        ok = st.R >= prev.scaled(100)
        out.append(CheckResult(st.n, "growth_b", ok, f"R_{st.n}={st.R} vs 100*R_{st.n - 1}={prev.scaled(100)}"))
    return out


def check_ball_disjoint(m: ConstructionManifest, n: int) -> CheckResult:
    st = m.stage(n)
    ok = le(2 * st.ball_radius, m.s_min)
    return CheckResult(n, "ball_disjoint", ok, f"2r={format_rational(2 * st.ball_radius)} vs s_min={m.s_min}")


def outer_radius(m: ConstructionManifest, st: Stage) -> Lin:
    """max rho over the cube (attained at a vertex) plus the ball radius."""
    top = max(eval_norm(m.norm, w) for w in st.vertices())
    return top.lin() + st.ball_radius


def inner_radius(m: ConstructionManifest, st: Stage) -> Lin:
    """A lower bound for rho over the thickened block: c_lo |q|_2 - r."""
    q = st.nearest_box_point()
    q2 = sum(c * c for c in q)
    return Lin(0, {q2: m.equivalence.c_lo}) - st.ball_radius


def check_cube_fit(m: ConstructionManifest, n: int) -> CheckResult:
    st = m.stage(n)
    half = st.R.lin() / 2
    for w in st.vertices():
        val = eval_norm(m.norm, w)
        if not lt(val.lin() + st.ball_radius, half):
            return CheckResult(n, "cube_fit", False, f"vertex {w}: rho={val} + r >= R/2", {"vertex": w})
    return CheckResult(n, "cube_fit", True, f"{2 ** m.dim} vertices inside R/2 by at least r")


def check_inner_exclusion(m: ConstructionManifest, n: int) -> CheckResult:
    st = m.stage(n)
    q = st.nearest_box_point()
    need = m.R_prev(n).lin() * 10
    ok = le(need, inner_radius(m, st))
    return CheckResult(n, "inner_exclusion", ok,
                       f"c_lo|q|-r ~ {_approx(inner_radius(m, st)):.6g} vs 10R_prev ~ {_approx(need):.6g}",
                       {"q": q})


def check_density(m: ConstructionManifest, balls_ok=None, omega=None) -> tuple[list[CheckResult], list[DensityStage]]:
    """omega-cancelled density per stage.

    ``omega`` only feeds the absolute volumes in the report; the verdict
    never reads it.
    """
    d = m.dim
    if omega is None:
        omega, kind = _omega(m)
    else:
        kind = "given"
    results, rows = [], []
    for st in m.stages:
        if balls_ok is not None and not balls_ok.get(st.n, False):
            results.append(CheckResult(st.n, "density_c", False, "precondition unmet: balls not disjoint"))
            continue
        lhs = st.ball_count * st.ball_radius ** d
        ok = m.f.density_holds(lhs, st.R, d)
        rhs = m.f.upper_bound(st.R) * _power_upper(st.R, d)
        slack = math.inf if rhs == 0 else _approx(lhs / rhs)
        volP = _approx(lhs) * omega
        volB = _approx(_power_upper(st.R, d)) * omega
        rows.append(DensityStage(st.n, ok, lhs, rhs, slack, volP, volB, kind))
        results.append(CheckResult(st.n, "density_c", ok,
                                   f"N r^d = {_approx(lhs):.6g} vs f(R)R^d <= {_approx(rhs):.6g} (slack {slack:.4g})"))
    return results, rows


def _omega(m: ConstructionManifest) -> tuple[float, str]:
    try:
        v = unit_ball_volume(m.norm)
        return v.value, "exact"
    except ConfigError:
        v = unit_ball_volume(m.norm, budget=20_000, seed=0)
        return v.estimate, "statistical"


def check_avoidance(m: ConstructionManifest, gap_ok: dict[int, bool], fit_ok: dict[int, bool]):
    """Replay the induction: intra-block margins and cross-block intervals.

    Returns ``(results, margins)`` where ``margins[(n, j)]`` is a certified
    lower bound (float, rounded down) on ``|rho(x-y) - R_j|`` for x, y in
    block n (intra pairs).
    """
    results, margins = [], {}
    stages = m.stages
    outer = {st.n: outer_radius(m, st) for st in stages}
    inner = {st.n: inner_radius(m, st) for st in stages}
    for st in stages:
        n = st.n
        problems = []
        # (1) j < n: lattice differences avoid R_j by eps_{n-1}; thickening costs 2r
        if n > 1:
            if not gap_ok.get(n - 1, False):
                problems.append(f"needs gap_a at stage {n - 1}")
            margin = stages[n - 2].eps - 2 * st.ball_radius
            if margin <= 0:
                problems.append(f"eps_{n - 1} - 2r = {format_rational(margin)} <= 0")
            for j in range(1, n):
                margins[(n, j)] = margin
        # (2) j >= n: both endpoints lie in the ball of radius R_n/2
        if not fit_ok.get(n, False):
            problems.append("needs cube_fit")
        for sj in stages[n - 1:]:
            gap = sj.R.lin() - outer[n] * 2
            if gap.sign() < 0:
                problems.append(f"2*outer_{n} > R_{sj.n}")
            margins[(n, sj.n)] = _float_down(gap)
        if problems:
            detail = "; ".join(problems)
        elif n > 1:
            detail = f"intra-block margin >= {format_rational(margins[(n, 1)])} for j < {n}"
        else:
            detail = "intra-block distances below R_1"
        results.append(CheckResult(n, "avoidance_margin", not problems, detail,
                                   {"margins": {j: v for (nn, j), v in margins.items() if nn == n}}))
        # (3) m < n: distances lie strictly between inner_n - outer_m and outer_n + outer_m
        problems = []
        for mm in range(1, n):
            lo = inner[n] - outer[mm]
            hi = outer[n] + outer[mm]
            for sj in stages:
                R = sj.R.lin()
                if not (le(R, lo) or le(hi, R)):
                    problems.append(f"R_{sj.n} inside cross-block range ({mm},{n})")
        results.append(CheckResult(n, "cross_block_separation", not problems,
                                   "; ".join(problems) or (f"{n - 1} earlier blocks clear" if n > 1 else "first block")))
    return results, margins


def _approx(x) -> float:
    """Float for reports; inf past the double range."""
    try:
        return float(x)
    except OverflowError:
        return math.copysign(math.inf, Lin.of(x).sign())


def _float_down(x: Lin) -> float:
    lo, _ = x.bounds(64)
    f = _approx(lo)
    if math.isinf(f):
        return f if f < 0 else math.nextafter(f, 0)
    return f if Fraction(f) <= lo else math.nextafter(f, -math.inf)


# -- driver ----------------------------------------------------------------

def certify(m: ConstructionManifest, deep: bool = False, enum_budget: int = DEFAULT_ENUM_BUDGET,
            factor_budget: int = DEFAULT_FACTOR_BUDGET) -> CertReport:
    """Run every check and collect a deterministic report (never raises on a failed check)."""
    with unlimited_int_digits():
        return _certify(m, deep, enum_budget, factor_budget)


def _certify(m, deep, enum_budget, factor_budget) -> CertReport:
    results = [check_constants(m), check_structure(m)]
    if not m.norm.exact or not m.stages:
        return CertReport(tuple(results))
    if [st.n for st in m.stages] != list(range(1, len(m.stages) + 1)):
        # per-stage checks address stages by index; the structure failure already explains why
        return CertReport(tuple(results))
    per_stage: dict[int, list[CheckResult]] = {st.n: [] for st in m.stages}

    def add(r):
        per_stage.setdefault(r.stage, []).append(r)

    gap_ok, fit_ok, balls_ok = {}, {}, {}
    for st in m.stages:
        r = _guard(lambda: check_condition_a(m, st.n, deep, enum_budget, factor_budget), st.n, "gap_a")
        gap_ok[st.n] = r.passed
        add(r)
    for r in check_growth(m):
        add(r)
    for st in m.stages:
        r = check_ball_disjoint(m, st.n)
        balls_ok[st.n] = r.passed
        add(r)
        r = _guard(lambda: check_cube_fit(m, st.n), st.n, "cube_fit")
        add(r)
        # outer containment plus inner exclusion make up the full fit
        inner = _guard(lambda: check_inner_exclusion(m, st.n), st.n, "inner_exclusion")
        add(inner)
        fit_ok[st.n] = r.passed and inner.passed
    dens, rows = check_density(m, balls_ok)
    for r in dens:
        add(r)
    try:
        avoid, margins = check_avoidance(m, gap_ok, fit_ok)
    except DistAvoidError as exc:
        avoid = [CheckResult(st.n, name, False, f"error: {exc}") for st in m.stages
                 for name in ("avoidance_margin", "cross_block_separation")]
        margins = {}
    for r in avoid:
        add(r)
    order = {name: i for i, name in enumerate(STAGE_CHECKS)}
    for n in sorted(per_stage):
        results.extend(sorted(per_stage[n], key=lambda r: order.get(r.name, 99)))
    return CertReport(tuple(results), tuple(rows), margins)


def _guard(fn, n, name) -> CheckResult:
    try:
        return fn()
    except DistAvoidError as exc:
        return CheckResult(n, name, False, f"error: {exc}")
