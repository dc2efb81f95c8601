"""SVG 1.1 pictures of a manifest (d = 1 or 2).  Illustrative only.

Coordinates are divided by R_n of the focused stage so that every stage
renders at a comparable size.  The rho-spheres are polygons sampled from
the norm's boundary; nothing drawn here feeds any verification.
"""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

import numpy as np

from .errors import ConfigError
from .model import ConstructionManifest
from .norms import norm_values

SEGMENTS = 256
BALL_SEGMENTS = 32
MAX_MARKS = 2000


def _num(x: float) -> str:
    return f"{x:.6g}"


def _sphere(norm, radius: float, scale: float, segments: int, center=(0.0, 0.0)) -> str:
    t = np.linspace(0.0, 2 * math.pi, segments, endpoint=False)
    u = np.stack([np.cos(t), np.sin(t)], axis=1)
    pts = u * (radius / norm_values(norm, u))[:, None]
    pts = (pts + np.asarray(center)) / scale
    # SVG's y axis points down
    return " ".join(f"{_num(x)},{_num(-y)}" for x, y in pts)


def _stride(count: int, cap: int) -> int:
    return max(1, math.ceil(count / cap))


def render(m: ConstructionManifest, stage: int | None = None, max_marks: int = MAX_MARKS) -> str:
    """Return an SVG document focused on one stage (default: stage 1)."""
    n = 1 if stage is None else stage
    st = m.stage(n)
    if m.dim == 2:
        body = _render_2d(m, st, max_marks)
    elif m.dim == 1:
        body = _render_1d(m, st, max_marks)
    else:
        raise ConfigError(f"rendering supports d = 1 or 2, not d = {m.dim}")
    head = ('<?xml version="1.0" encoding="UTF-8"?>\n'
            '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" ')
    return head + body + "</svg>\n"


def _render_2d(m, st, cap) -> str:
    R = float(st.R)
    Rprev = float(m.R_prev(st.n))
    # keep balls visible when the true radius is far below a pixel
    r = max(float(st.ball_radius), 0.001 * R)
    w = 1.2
    out = [f'viewBox="{_num(-0.6)} {_num(-0.6)} {_num(w)} {_num(w)}" width="800" height="800">\n',
           f"<desc>{escape(m.norm.text)}, stage {st.n} of {len(m.stages)}; coordinates in units of R_{st.n}; "
           "illustrative rendering</desc>\n",
           '<style>.avoided{fill:none;stroke:#c0392b;stroke-width:0.002}'
           '.annulus{fill:#eaf2f8;stroke:#2e86c1;stroke-width:0.001}'
           '.hole{fill:#ffffff;stroke:#2e86c1;stroke-width:0.001}'
           '.cube{fill:none;stroke:#117a65;stroke-width:0.0015}'
           '.ball{fill:#1e8449;stroke:none}</style>\n']
    out.append(f'<polygon class="annulus" points="{_sphere(m.norm, R / 2, R, SEGMENTS)}"/>\n')
    out.append(f'<polygon class="hole" points="{_sphere(m.norm, 10 * Rprev, R, SEGMENTS)}"/>\n')
    for sj in m.stages:
        out.append(f'<polygon class="avoided" data-stage="{sj.n}" points="{_sphere(m.norm, float(sj.R), R, SEGMENTS)}"/>\n')
    x0, y0 = (float(a) for a in st.anchor)
    side = float(st.side)
    out.append(f'<rect class="cube" x="{_num(x0 / R)}" y="{_num(-(y0 + side) / R)}" '
               f'width="{_num(side / R)}" height="{_num(side / R)}"/>\n')
    k = _stride(st.ball_count, cap)
    step = _stride(st.side + 1, math.isqrt(cap)) if k > 1 else 1
    if step > 1:
        out.append(f"<desc>balls subsampled: every {step}th center per axis</desc>\n")
    for i in range(0, st.side + 1, step):
        for j in range(0, st.side + 1, step):
            c = (x0 + i, y0 + j)
            out.append(f'<polygon class="ball" points="{_sphere(m.norm, r, R, BALL_SEGMENTS, c)}"/>\n')
    return "".join(out)


def _render_1d(m, st, cap) -> str:
    R = float(st.R)
    Rprev = float(m.R_prev(st.n))
    r = float(st.ball_radius)
    H = 0.1
    out = [f'viewBox="{_num(-0.05)} {_num(-H)} {_num(1.15)} {_num(2 * H)}" width="1150" height="200">\n',
           f"<desc>{escape(m.norm.text)}, stage {st.n} of {len(m.stages)}; positions in units of R_{st.n}; "
           "illustrative rendering</desc>\n",
           '<style>.axis{stroke:#555;stroke-width:0.002}.avoided{stroke:#c0392b;stroke-width:0.003}'
           '.bound{stroke:#2e86c1;stroke-width:0.002;stroke-dasharray:0.01,0.01}'
           '.interval{fill:#1e8449}</style>\n',
           f'<line class="axis" x1="0" y1="0" x2="{_num(1.1)}" y2="0"/>\n']
    for sj in m.stages:
        x = float(sj.R) / R
        out.append(f'<line class="avoided" data-stage="{sj.n}" x1="{_num(x)}" y1="{_num(-H)}" '
                   f'x2="{_num(x)}" y2="{_num(H)}"/>\n')
    for x in (10 * Rprev / R, 0.5):
        out.append(f'<line class="bound" x1="{_num(x)}" y1="{_num(-H / 2)}" x2="{_num(x)}" y2="{_num(H / 2)}"/>\n')
    k = _stride(st.ball_count, cap)
    if k > 1:
        out.append(f"<desc>intervals subsampled: every {k}th center</desc>\n")
    a = st.anchor[0]
    # keep a visible width even when the true interval is far below a pixel
    wid = max(2 * r / R, 0.001)
    for i in range(0, st.side + 1, k):
        c = (a + i) / R
        out.append(f'<rect class="interval" x="{_num(c - wid / 2)}" y="{_num(-0.02)}" '
                   f'width="{_num(wid)}" height="0.04"/>\n')
    return "".join(out)
