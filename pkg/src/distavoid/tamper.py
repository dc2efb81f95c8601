"""Single-field tamperings of a certified manifest.

Each entry changes exactly one stored number and should make
:func:`distavoid.certify.certify` report at least one failed check.
"""
from __future__ import annotations

from .model import ConstructionManifest
from .scale import Scale


def _radius_above_half_smin(m: ConstructionManifest):
    return m.s_min.value if m.s_min.rational else m.s_min.bounds(32)[1]


def mutation_corpus(m: ConstructionManifest, stage: int = 1) -> list[tuple[str, ConstructionManifest]]:
    st = m.stage(stage)
    out = []
    below = st.gap.below if st.gap.below is not None else Scale.rat(0)
    out.append(("R_onto_lattice", m.with_stage(stage, R=below)))
    if len(m.stages) >= 2:
        out.append(("growth_99", m.with_stage(2, R=m.stage(1).R.scaled(99))))
    else:
        out.append(("growth_99", m.with_stage(1, R=Scale.rat(99))))
    out.append(("inflated_M", m.with_stage(stage, side=st.side * 2 + 1)))
    out.append(("anchor_inner", m.with_stage(stage, anchor=(1,) + (0,) * (m.dim - 1))))
    out.append(("eps_above_gap", m.with_stage(stage, eps=st.gap.eps * 4)))
    out.append(("ball_radius_large", m.with_stage(stage, ball_radius=_radius_above_half_smin(m))))
    return out
