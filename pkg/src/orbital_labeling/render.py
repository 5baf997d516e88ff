"""SVG drawings of instances and labelings.

The y axis is flipped so that angles grow counter-clockwise on screen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from xml.sax.saxutils import quoteattr

from .errors import InvalidArgument
from .geometry import ANGLE_TOL, TAU, Direction, Labeling
from .instance import Instance


@dataclass(frozen=True)
class RenderStyle:
    size: int = 600
    margin: int = 20
    band: float = 0.12  # label ring thickness as a fraction of the disk radius
    boundary_width: float = 1.5
    leader_width: float = 1.2
    label_width: float = 0.8
    feature_radius: float = 3.0
    boundary_color: str = "#222222"
    feature_color: str = "#c0392b"
    leader_color: str = "#2c3e50"
    label_fill: str = "#f5d76e"
    label_stroke: str = "#7f6000"
    candidate_color: str = "#888888"
    show_candidates: bool = True
    show_split: bool = False


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("", "-0") else s


class _Canvas:
    def __init__(self, instance: Instance, style: RenderStyle):
        self.R = instance.disk_radius
        self.c = style.size / 2
        outer = self.R * (1 + style.band)
        self.scale = (style.size / 2 - style.margin) / outer if outer > 0 else 1.0

    def xy(self, radius: float, angle: float) -> tuple[str, str]:
        s = radius * self.scale
        return _f(self.c + s * math.cos(angle)), _f(self.c - s * math.sin(angle))

    def arc(self, radius: float, start: float, extent: float, ccw: bool) -> str:
        """Arc path command from the current point (at ``start``) sweeping ``extent``."""
        end = start + extent if ccw else start - extent
        x, y = self.xy(radius, end)
        rr = _f(radius * self.scale)
        large = 1 if extent > math.pi else 0
        # on screen ccw means negative angle direction, i.e. sweep-flag 0
        sweep = 0 if ccw else 1
        return f"A {rr} {rr} 0 {large} {sweep} {x} {y}"


def _leader_path(cv: _Canvas, r: float, ld) -> str:
    R = cv.R
    if ld.direction is Direction.RADIAL or ld.span <= 0.0:
        x0, y0 = cv.xy(r, ld.port)
        x1, y1 = cv.xy(R, ld.port)
        return f"M {x0} {y0} L {x1} {y1}"
    ccw = ld.direction is Direction.CCW
    alpha = ld.feature_angle
    x0, y0 = cv.xy(r, alpha)
    x1, y1 = cv.xy(R, ld.port)
    return f"M {x0} {y0} {cv.arc(r, alpha, ld.span, ccw)} L {x1} {y1}"


def _label_path(cv: _Canvas, start: float, extent: float, band: float) -> str:
    R = cv.R
    Ro = R * (1 + band)
    # a single SVG arc cannot close a full turn, so draw two halves
    parts = [(start, extent)] if extent < TAU - ANGLE_TOL else [(start, extent / 2), (start + extent / 2, extent / 2)]
    out = []
    for s, e in parts:
        xo, yo = cv.xy(Ro, s)
        xi, yi = cv.xy(R, s + e)
        out.append(f"M {xo} {yo} {cv.arc(Ro, s, e, True)} L {xi} {yi} {cv.arc(R, s + e, e, False)} Z")
    return " ".join(out)


def render_svg(instance: Instance, labeling: Labeling | None = None, style: RenderStyle | None = None) -> str:
    style = style or RenderStyle()
    cv = _Canvas(instance, style)
    ids = set(instance.ids)
    if labeling is not None:
        for item in list(labeling.labels) + list(labeling.leaders):
            if item.feature not in ids:
                raise InvalidArgument(f"labeling refers to unknown feature {item.feature!r}")
    size = style.size
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
    ]
    c = _f(cv.c)
    lines.append(
        f'<circle class="boundary" cx="{c}" cy="{c}" r="{_f(cv.R * cv.scale)}" fill="none" '
        f'stroke="{style.boundary_color}" stroke-width="{_f(style.boundary_width)}"/>'
    )
    if labeling is not None:
        lines.append('<g class="labels">')
        for lb in labeling.labels:
            lines.append(
                f'<path class="label" data-feature={quoteattr(lb.feature)} data-start="{lb.start!r}" '
                f'data-extent="{lb.extent!r}" d="{_label_path(cv, lb.start, lb.extent, style.band)}" '
                f'fill="{style.label_fill}" stroke="{style.label_stroke}" stroke-width="{_f(style.label_width)}"/>'
            )
        lines.append("</g>")
    if style.show_candidates and instance.candidates:
        lines.append('<g class="candidates">')
        for a in instance.candidates:
            x0, y0 = cv.xy(cv.R * 0.97, a)
            x1, y1 = cv.xy(cv.R * 1.03, a)
            lines.append(
                f'<line class="candidate" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="{style.candidate_color}"/>'
            )
        lines.append("</g>")
    if labeling is not None:
        radii = instance.radii
        lines.append('<g class="leaders">')
        for ld in labeling.leaders:
            lines.append(
                f'<path class="leader" data-feature={quoteattr(ld.feature)} d="{_leader_path(cv, radii[ld.feature], ld)}" '
                f'fill="none" stroke="{style.leader_color}" stroke-width="{_f(style.leader_width)}"/>'
            )
        lines.append("</g>")
        if style.show_split:
            from .free_order import splitting_radius

            b = splitting_radius(labeling)
            if b is not None:
                x1, y1 = cv.xy(cv.R, b)
                lines.append(f'<line class="split" x1="{c}" y1="{c}" x2="{x1}" y2="{y1}" stroke="#27ae60" stroke-dasharray="4 3"/>')
    lines.append('<g class="features">')
    for f in instance.features:
        x, y = cv.xy(f.r, f.angle)
        lines.append(
            f'<circle class="feature" data-feature={quoteattr(f.id)} cx="{x}" cy="{y}" '
            f'r="{_f(style.feature_radius)}" fill="{style.feature_color}"/>'
        )
    lines.append("</g>")
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
