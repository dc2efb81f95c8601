"""Immutable records describing a finite-stage construction."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from fractions import Fraction

from .decay import FSpec
from .norms import EquivalenceConstants, NormSpec
from .scale import Scale
from .spectrum import GapCertificate


@dataclass(frozen=True)
class Stage:
    """Block n: the cube ``anchor + {0..side}^d`` thickened by ``ball_radius``.

    ``R`` is the avoided distance R_n, ``eps`` the gap half-width eps_n and
    ``eps_prev`` is eps_{n-1}, which sets the ball radius eps_{n-1}/4.
    """

    n: int
    R: Scale
    eps: Fraction
    eps_prev: Fraction
    anchor: tuple[int, ...]
    side: int
    ball_radius: Fraction
    ball_count: int
    gap: GapCertificate
    shrunk: bool = False
    escalations: int = 0

    def vertices(self):
        return [tuple(a + s * self.side for a, s in zip(self.anchor, bits))
                for bits in itertools.product((0, 1), repeat=len(self.anchor))]

    def nearest_box_point(self):
        """Coordinatewise clamp of the origin into the block's bounding box."""
        return tuple(min(max(0, a), a + self.side) for a in self.anchor)


@dataclass(frozen=True)
class CertSummary:
    """Per-(stage, check) verdicts; stage 0 holds global checks."""

    status: str
    checks: tuple[tuple[int, str, bool, str], ...] = ()

    @property
    def certified(self) -> bool:
        return self.status == "certified"


@dataclass(frozen=True)
class ConstructionManifest:
    dim: int
    norm: NormSpec
    f: FSpec
    eps0: Fraction
    equivalence: EquivalenceConstants
    s_min: Scale
    stages: tuple[Stage, ...]
    certification: CertSummary | None = None

    def stage(self, n: int) -> Stage:
        if not 1 <= n <= len(self.stages):
            from .errors import ConfigError
            raise ConfigError(f"stage {n} out of range 1..{len(self.stages)}")
        return self.stages[n - 1]

    @property
    def R0(self) -> Scale:
        return Scale.rat(1)

    def R_prev(self, n: int) -> Scale:
        return self.R0 if n == 1 else self.stages[n - 2].R

    def with_stage(self, n: int, **changes) -> "ConstructionManifest":
        """Copy with one stage's fields replaced (certification dropped)."""
        stages = list(self.stages)
        stages[n - 1] = replace(stages[n - 1], **changes)
        return replace(self, stages=tuple(stages), certification=None)
