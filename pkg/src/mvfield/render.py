"""Deterministic SVG rendering for 2D runs.

Conventions: complex edges in light gray, matching arrows from barycenter
to barycenter for every active pair variable, singleton multivectors in
red, Morse sets in a fixed color palette, the gradient part grayed out,
critical multivectors outlined.  3D complexes are not rendered (the DOT
export covers them).
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .dynamics import MorseReport, gradient_part
from .geometry import VectorAssignment
from .mvf import MultivectorField

PALETTE = ["#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#bcbd22", "#8c564b"]
GRADIENT_FILL = "#d9d9d9"
SINGLETON_FILL = "#d62728"
CRITICAL_STROKE = "#7f0000"


class UnsupportedRenderError(ValueError):
    pass


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def render_svg(
    field: MultivectorField,
    assignment: VectorAssignment,
    report: Optional[MorseReport] = None,
    arrows: Optional[Sequence[tuple[int, int]]] = None,
    mode: str = "field",
    size: int = 800,
) -> str:
    """Render a 2D field to SVG text.

    mode "field": parts + arrows; "gradient": Morse sets colored against a
    grayed gradient part; "morse": Morse sets only.
    """
    K = field.complex
    if assignment.dim != 2:
        raise UnsupportedRenderError("SVG rendering supports 2D embeddings only")
    coords = np.array([K.coords[v] for v in sorted(K.coords)])
    lo = coords.min(axis=0)
    hi = coords.max(axis=0)
    span = np.maximum(hi - lo, 1e-12)
    margin = 0.05

    def xy(p):
        u = (p - lo) / span
        x = (margin + u[0] * (1 - 2 * margin)) * size
        y = (1 - margin - u[1] * (1 - 2 * margin)) * size
        return x, y

    morse_of_part: dict[int, int] = {}
    grad: frozenset[int] = frozenset()
    if report is not None:
        for mi, ms in enumerate(report.morse_sets):
            for pid in ms.part_ids:
                morse_of_part[pid] = mi
        grad = gradient_part(field, report)

    critical_parts = set()
    if report is not None:
        critical_parts = {p for p, f in enumerate(report.critical_flags) if f}

    def part_fill(pid: int) -> Optional[str]:
        if len(field.parts[pid]) == 1 and mode == "field":
            return SINGLETON_FILL
        if pid in morse_of_part:
            return PALETTE[morse_of_part[pid] % len(PALETTE)]
        if mode == "field":
            return "#f2f2f2"
        if mode in ("gradient", "morse"):
            return GRADIENT_FILL if mode == "gradient" else None
        return None

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        "<defs><marker id='arr' viewBox='0 0 10 10' refX='9' refY='5' "
        "markerWidth='5' markerHeight='5' orient='auto-start-reverse'>"
        "<path d='M 0 0 L 10 5 L 0 10 z' fill='#333333'/></marker></defs>",
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]

    # Triangles first (fills), then edges, then arrows, then vertices.
    for h in range(len(K)):
        if K.dims[h] != 2:
            continue
        pid = field.part_of(h)
        fill = part_fill(pid)
        if fill is None:
            continue
        pts = [xy(K.coords[v]) for v in K.simplices[h]]
        path = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        stroke = CRITICAL_STROKE if pid in critical_parts else "none"
        out.append(f'<polygon points="{path}" fill="{fill}" fill-opacity="0.65" stroke="{stroke}"/>')
    for h in range(len(K)):
        if K.dims[h] != 1:
            continue
        a, b = K.simplices[h]
        (x1, y1), (x2, y2) = xy(K.coords[a]), xy(K.coords[b])
        pid = field.part_of(h)
        if len(field.parts[pid]) == 1 and mode == "field":
            color, width = SINGLETON_FILL, "2.0"
        elif pid in critical_parts and mode != "morse":
            color, width = CRITICAL_STROKE, "1.5"
        else:
            color, width = "#b0b0b0", "0.7"
        out.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )
    if arrows and mode == "field":
        for s, t in arrows:
            x1, y1 = xy(assignment.barycenters[s])
            x2, y2 = xy(assignment.barycenters[t])
            out.append(
                f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
                f'stroke="#333333" stroke-width="0.8" marker-end="url(#arr)"/>'
            )
    for h in range(len(K)):
        if K.dims[h] != 0:
            continue
        x, y = xy(K.coords[K.simplices[h][0]])
        pid = field.part_of(h)
        if len(field.parts[pid]) == 1 and mode == "field":
            color, r = SINGLETON_FILL, 3.0
        elif h in grad and mode == "gradient":
            color, r = GRADIENT_FILL, 2.0
        else:
            color, r = "#404040", 2.0
        out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{color}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
