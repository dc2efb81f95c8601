"""Plan the scales R_n, eps_n and the cubes L_n, then certify the result.

The growth, gap and decay requirements are used to *choose* each stage;
every property the final set relies on is then re-established by
:mod:`distavoid.certify` from the manifest alone before :func:`build`
returns.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from fractions import Fraction

from .arith import DEFAULT_FACTOR_BUDGET
from .decay import FSpec
from .errors import CertificationError, ConfigError, NonExactNormError
from .model import ConstructionManifest, Stage
from .norms import EquivalenceConstants, NormSpec, equivalence_constants, eval_norm, min_lattice_norm
from .scale import Scale, largest_pow2_at_most, lin_floor, lt
from .spectrum import DEFAULT_ENUM_BUDGET, find_gap

log = logging.getLogger(__name__)

MAX_ESCALATIONS = 64
NEXT_GAP_TRIES = 4


@dataclass(frozen=True)
class Budgets:
    enum_points: int = DEFAULT_ENUM_BUDGET
    factor_iterations: int = DEFAULT_FACTOR_BUDGET


def threshold(f: FSpec, delta) -> Scale:
    return f.threshold(delta)


def initial_eps(s_min: Scale) -> Fraction:
    # balls of radius eps0/4 around lattice points stay disjoint when eps0 <= s_min
    return min(Fraction(1), largest_pow2_at_most(s_min))


def place_cube(norm: NormSpec, consts: EquivalenceConstants, R: Scale, R_prev: Scale,
               M: int, ball_radius: Fraction):
    """Anchor ``(a, 0, ..., 0)`` for the cube of side M, or None to ask for a smaller M.

    ``a`` is the least integer with ``c_lo * a > 10 R_prev + ball_radius`` so the
    thickened block stays outside the ball of radius 10 R_prev.  The outer
    test uses convexity: rho is maximised over the cube at a vertex.
    """
    if M < 0:
        raise ConfigError("cube side must be nonnegative")
    a = lin_floor((R_prev.lin() * 10 + ball_radius) / consts.c_lo) + 1
    anchor = (a,) + (0,) * (norm.dim - 1)
    half = R.lin() / 2
    for w in _vertices(anchor, M):
        if not lt(eval_norm(norm, w).lin() + ball_radius, half):
            return None
    return anchor


def _vertices(anchor, M):
    return [tuple(a + s * M for a, s in zip(anchor, bits))
            for bits in itertools.product((0, 1), repeat=len(anchor))]


def _largest_fitting_side(norm, consts, R, R_prev, M, r):
    """Binary search for the largest side <= M whose cube fits; containment is monotone in M."""
    if place_cube(norm, consts, R, R_prev, 0, r) is None:
        return None
    lo, hi = 0, M
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if place_cube(norm, consts, R, R_prev, mid, r) is None:
            hi = mid - 1
        else:
            lo = mid
    return lo


def plan_stage(prev: Stage | None, f: FSpec, norm: NormSpec, consts: EquivalenceConstants,
               eps0: Fraction, budgets: Budgets = Budgets()) -> Stage:
    d = norm.dim
    if prev is None:
        n, R_prev, eps_prev = 1, Scale.rat(1), eps0
    else:
        n, R_prev, eps_prev = prev.n + 1, prev.R, prev.eps
    r = eps_prev / 4
    delta = (eps_prev / (16 * consts.C_hi)) ** d
    lower = max(R_prev.scaled(100), f.threshold(delta))
    log.debug("stage %d: lower bound %s", n, lower)

    for escalation in range(MAX_ESCALATIONS):
        gap = find_gap(norm, lower, budgets.enum_points, budgets.factor_iterations)
        R = gap.R
        M0 = R.scaled(1 / (4 * consts.C_hi)).floor()
        anchor = place_cube(norm, consts, R, R_prev, M0, r)
        M, shrunk = M0, False
        if anchor is None:
            M = _largest_fitting_side(norm, consts, R, R_prev, M0, r)
            shrunk = True
            anchor = None if M is None else place_cube(norm, consts, R, R_prev, M, r)
        if anchor is not None:
            N = (M + 1) ** d
            if f.density_holds(N * r ** d, R, d):
                return Stage(n=n, R=R, eps=min(eps_prev, gap.eps), eps_prev=eps_prev, anchor=anchor,
                             side=M, ball_radius=r, ball_count=N, gap=gap, shrunk=shrunk,
                             escalations=escalation)
        log.info("stage %d: R=%s fails density or fit, escalating", n, R)
        # f keeps decaying, so a later gap eventually satisfies the density bound;
        # neighbouring gaps are tried first, then the scale doubles
        if escalation < NEXT_GAP_TRIES and gap.above is not None and R < gap.above:
            lower = gap.above
        else:
            lower = R.scaled(2)
    raise CertificationError(f"stage {n}: density unsatisfiable after {MAX_ESCALATIONS} escalations")


def build(dim: int, norm: NormSpec, f: FSpec, stage_count: int,
          budgets: Budgets = Budgets(), certify: bool = True) -> ConstructionManifest:
    """Deterministic finite-stage construction, certified before it is returned."""
    if stage_count < 1:
        raise ConfigError("stage_count must be >= 1")
    if norm.dim != dim:
        raise ConfigError(f"norm dimension {norm.dim} does not match dim {dim}")
    if not norm.exact:
        raise NonExactNormError(f"{norm} supports estimation only; construction needs exact evaluation")
    if not f.tends_to_zero():
        raise ConfigError(f"{f.text} does not tend to 0, so no threshold exists for small densities")
    consts = equivalence_constants(norm)
    s_min = min_lattice_norm(norm)
    eps0 = initial_eps(s_min)
    stages = []
    prev = None
    for _ in range(stage_count):
        prev = plan_stage(prev, f, norm, consts, eps0, budgets)
        stages.append(prev)
    m = ConstructionManifest(dim, norm, f, eps0, consts, s_min, tuple(stages))
    if not certify:
        return m
    from .certify import certify as run_certify

    report = run_certify(m, enum_budget=budgets.enum_points, factor_budget=budgets.factor_iterations)
    if not report.ok:
        raise CertificationError("construction failed certification:\n" + "\n".join(report.failure_lines()), report)
    return replace(m, certification=report.summary())
