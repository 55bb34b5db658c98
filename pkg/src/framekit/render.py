"""Deterministic SVG rendering of frames, loads and internal-force diagrams.

Five panel kinds: the bare geometry (node/element ids, support symbols), the
applied loads (arrows), and axial/shear/moment diagrams drawn perpendicular
to each member with the largest ordinate scaled to a fixed fraction of the
larger overall frame dimension.  Output is pure SVG 1.1 text with all
coordinates rounded to two decimals, so identical inputs produce identical
bytes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import MissingResult
from .geometry import ElementKind, TopologyModel
from .loads import LoadSet
from .solver import AnalysisResult, InternalForceDiagram, internal_forces

__all__ = ["RenderKind", "RenderSpec", "render"]


class RenderKind(str, Enum):
    GEOMETRY = "geometry"
    LOADS = "loads"
    AXIAL = "axial"
    SHEAR = "shear"
    MOMENT = "moment"


FORCE_KINDS = frozenset({RenderKind.AXIAL, RenderKind.SHEAR, RenderKind.MOMENT})


@dataclass(frozen=True)
class RenderSpec:
    kind: RenderKind = RenderKind.GEOMETRY
    scale: float = 40.0              # px per metre
    ordinate_fraction: float = 0.15  # peak diagram ordinate vs. larger frame dimension
    node_ids: bool = True
    element_ids: bool = False


_DIAGRAM_STYLE = {
    RenderKind.AXIAL: ("#0066cc", "Axial [kN]"),
    RenderKind.SHEAR: ("#008844", "Shear [kN]"),
    RenderKind.MOMENT: ("#cc6600", "Moment [kN·m]"),
}
_FONT = "Helvetica, Arial, sans-serif"


def _f(v: float) -> str:
    out = f"{v:.2f}"
    return "0.00" if out == "-0.00" else out


class _Canvas:
    """Accumulates SVG fragments over a world->pixel transform (y up)."""

    def __init__(self, xmin: float, ymax: float, scale: float, margin: float):
        self.xmin = xmin
        self.ymax = ymax
        self.scale = scale
        self.margin = margin
        self.body: list[str] = []

    def px(self, x: float, y: float) -> tuple[float, float]:
        return (self.margin + (x - self.xmin) * self.scale,
                self.margin + (self.ymax - y) * self.scale)

    def line(self, a, b, stroke: str, width: float = 2.0) -> None:
        (x1, y1), (x2, y2) = self.px(*a), self.px(*b)
        self.body.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(x2)}" y2="{_f(y2)}" '
            f'stroke="{stroke}" stroke-width="{_f(width)}"/>')

    def polyline(self, pts, stroke: str, width: float = 1.5) -> None:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in (self.px(*p) for p in pts))
        self.body.append(
            f'<polyline points="{coords}" fill="none" stroke="{stroke}" '
            f'stroke-width="{_f(width)}"/>')

    def polygon(self, pts, color: str, width: float = 1.5) -> None:
        coords = " ".join(f"{_f(x)},{_f(y)}" for x, y in (self.px(*p) for p in pts))
        self.body.append(
            f'<polygon points="{coords}" fill="{color}" fill-opacity="0.30" '
            f'stroke="{color}" stroke-width="{_f(width)}"/>')

    def circle(self, c, r: float, fill: str, stroke: str) -> None:
        x, y = self.px(*c)
        self.body.append(
            f'<circle cx="{_f(x)}" cy="{_f(y)}" r="{_f(r)}" fill="{fill}" '
            f'stroke="{stroke}" stroke-width="1.00"/>')

    def text(self, c, s: str, size: float, fill: str,
             dx: float = 0.0, dy: float = 0.0, anchor: str = "start") -> None:
        x, y = self.px(*c)
        self.body.append(
            f'<text x="{_f(x + dx)}" y="{_f(y + dy)}" font-family="{_FONT}" '
            f'font-size="{_f(size)}" fill="{fill}" text-anchor="{anchor}">{s}</text>')

    def text_px(self, x: float, y: float, s: str, size: float, fill: str) -> None:
        self.body.append(
            f'<text x="{_f(x)}" y="{_f(y)}" font-family="{_FONT}" '
            f'font-size="{_f(size)}" fill="{fill}" text-anchor="start">{s}</text>')

    def arrow_px(self, tail, head, stroke: str) -> None:
        """Straight arrow in pixel space with a closed triangular head."""
        (x1, y1), (x2, y2) = tail, head
        length = math.hypot(x2 - x1, y2 - y1)
        if length < 1e-9:
            return
        ux, uy = (x2 - x1) / length, (y2 - y1) / length
        hl, hw = 8.0, 3.0
        bx, by = x2 - ux * hl, y2 - uy * hl
        self.body.append(
            f'<line x1="{_f(x1)}" y1="{_f(y1)}" x2="{_f(bx)}" y2="{_f(by)}" '
            f'stroke="{stroke}" stroke-width="1.50"/>')
        self.body.append(
            f'<path d="M {_f(x2)} {_f(y2)} L {_f(bx - uy * hw)} {_f(by + ux * hw)} '
            f'L {_f(bx + uy * hw)} {_f(by - ux * hw)} Z" fill="{stroke}"/>')


def render(m: TopologyModel, loads: LoadSet | None = None,
           result: AnalysisResult | None = None,
           spec: RenderSpec | None = None) -> str:
    """Render one panel of the model as an SVG document string."""
    spec = spec or RenderSpec()
    if spec.kind in FORCE_KINDS and result is None:
        raise MissingResult(f"{spec.kind.value} diagram needs analysis results")

    if m.nodes:
        xs = [n.x for n in m.nodes]
        ys = [n.y for n in m.nodes]
        xmin, xmax = min(xs), max(xs)
        ymin, ymax = min(ys), max(ys)
    else:
        xmin = xmax = ymin = ymax = 0.0
    world_w, world_h = xmax - xmin, ymax - ymin
    max_dim = max(world_w, world_h, 1e-9)
    margin = 40.0
    if spec.kind in FORCE_KINDS:
        margin += spec.ordinate_fraction * max_dim * spec.scale
    elif spec.kind is RenderKind.LOADS:
        margin += 70.0
    width = 2 * margin + world_w * spec.scale
    height = 2 * margin + world_h * spec.scale

    cv = _Canvas(xmin, ymax, spec.scale, margin)
    _draw_frame(cv, m)
    if spec.kind is RenderKind.LOADS and loads is not None:
        _draw_loads(cv, m, loads)
    if spec.kind in FORCE_KINDS:
        assert result is not None
        _draw_diagrams(cv, m, spec, result, loads or LoadSet(), max_dim)
    if spec.node_ids or spec.kind is RenderKind.GEOMETRY:
        for n in m.nodes:
            cv.text((n.x, n.y), str(n.id), 10.0, "#333333", dx=5.0, dy=-5.0)
    if spec.element_ids or spec.kind is RenderKind.GEOMETRY:
        node = {n.id: n for n in m.nodes}
        for e in m.elements:
            a, b = node.get(e.node_i), node.get(e.node_j)
            if a is None or b is None:
                continue
            mx, my = (a.x + b.x) / 2.0, (a.y + b.y) / 2.0
            cv.text((mx, my), f"e{e.id}", 9.0, "#777777", dx=4.0, dy=-4.0)
    title = _panel_title(spec, m, result, loads)
    cv.text_px(8.0, 18.0, title, 12.0, "#111111")

    head = (f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_f(width)}" height="{_f(height)}" '
            f'viewBox="0 0 {_f(width)} {_f(height)}">')
    background = f'<rect x="0" y="0" width="{_f(width)}" height="{_f(height)}" fill="#ffffff"/>'
    return "\n".join([head, background, *cv.body, "</svg>"]) + "\n"


def _panel_title(spec, m, result, loads) -> str:
    if spec.kind is RenderKind.GEOMETRY:
        return f"Geometry: {len(m.nodes)} nodes, {len(m.elements)} elements"
    if spec.kind is RenderKind.LOADS:
        n = len(loads.nodal) if loads else 0
        u = len(loads.member) if loads else 0
        return f"Loads: {n} nodal, {u} member"
    color, label = _DIAGRAM_STYLE[spec.kind]
    peak = 0.0
    for d in internal_forces(result, m, loads or LoadSet()):
        peak = max(peak, _diagram_peak(d, spec.kind))
    return f"{label}, peak {peak / 1000.0:g}"


def _draw_frame(cv: _Canvas, m: TopologyModel) -> None:
    node = {n.id: n for n in m.nodes}
    for e in m.elements:
        a, b = node.get(e.node_i), node.get(e.node_j)
        if a is None or b is None:
            continue
        color = "#444444" if e.kind is ElementKind.COLUMN else "#222222"
        cv.line((a.x, a.y), (b.x, b.y), color, 2.0)
    for s in m.supports:
        n = node.get(s.node_id)
        if n is None:
            continue
        x, y = cv.px(n.x, n.y)
        pts = f"M {_f(x)} {_f(y)} L {_f(x - 8)} {_f(y + 12)} L {_f(x + 8)} {_f(y + 12)} Z"
        if all(s.fixity):
            cv.body.append(f'<path d="{pts}" fill="#555555"/>')
        else:
            cv.body.append(f'<path d="{pts}" fill="none" stroke="#555555" '
                           f'stroke-width="1.50"/>')
        cv.body.append(f'<line x1="{_f(x - 11)}" y1="{_f(y + 14)}" x2="{_f(x + 11)}" '
                       f'y2="{_f(y + 14)}" stroke="#555555" stroke-width="1.50"/>')
        if all(s.fixity):  # hatch the base of fully fixed supports
            for k in range(4):
                hx = x - 10.0 + k * 6.0
                cv.body.append(
                    f'<line x1="{_f(hx)}" y1="{_f(y + 20)}" x2="{_f(hx + 5)}" '
                    f'y2="{_f(y + 14)}" stroke="#555555" stroke-width="1.00"/>')
    for n in m.nodes:
        cv.circle((n.x, n.y), 3.0, "#ffffff", "#333333")


def _draw_loads(cv: _Canvas, m: TopologyModel, loads: LoadSet) -> None:
    node = {n.id: n for n in m.nodes}
    for p in loads.nodal:
        n = node.get(p.node_id)
        if n is None:
            continue
        hx, hy = cv.px(n.x, n.y)
        if p.fx:
            sgn = 1.0 if p.fx > 0 else -1.0
            cv.arrow_px((hx - sgn * 48.0, hy), (hx, hy), "#cc2222")
            cv.text_px(hx - sgn * 48.0 - (34.0 if sgn > 0 else -4.0), hy - 4.0,
                       f"{abs(p.fx) / 1000.0:g} kN", 9.0, "#cc2222")
        if p.fy:
            sgn = 1.0 if p.fy > 0 else -1.0
            cv.arrow_px((hx, hy + sgn * 48.0), (hx, hy), "#cc2222")
            cv.text_px(hx + 4.0, hy + sgn * 48.0 + (10.0 if sgn > 0 else -4.0),
                       f"{abs(p.fy) / 1000.0:g} kN", 9.0, "#cc2222")
        if p.mz:
            cv.text_px(hx + 6.0, hy + 12.0, f"{p.mz / 1000.0:g} kN·m", 9.0, "#cc2222")
    elem = {e.id: e for e in m.elements}
    for u in loads.member:
        e = elem.get(u.element_id)
        if e is None:
            continue
        a, b = node.get(e.node_i), node.get(e.node_j)
        if a is None or b is None:
            continue
        length = math.hypot(b.x - a.x, b.y - a.y)
        if length < 1e-9:
            continue
        # local +y normal in world coordinates; load acts along sign(w) * normal
        nx = -(b.y - a.y) / length
        ny = (b.x - a.x) / length
        sgn = 1.0 if u.w > 0 else -1.0
        drop = 24.0 / cv.scale  # arrow length in world units
        count = max(2, int(length * cv.scale / 30.0))
        tails = []
        for i in range(count + 1):
            t = i / count
            px_pt = (a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
            tail = (px_pt[0] - sgn * nx * drop, px_pt[1] - sgn * ny * drop)
            tails.append(tail)
            cv.arrow_px(cv.px(*tail), cv.px(*px_pt), "#cc2222")
        cv.polyline(tails, "#cc2222", 1.0)
        mid = tails[len(tails) // 2]
        cv.text(mid, f"{abs(u.w) / 1000.0:g} kN/m", 9.0, "#cc2222", dx=4.0, dy=-4.0)


def _diagram_peak(d: InternalForceDiagram, kind: RenderKind) -> float:
    if kind is RenderKind.AXIAL:
        return abs(d.axial)
    xs = d.stations or (0.0,)
    if kind is RenderKind.SHEAR:
        return max(abs(d.shear_at(x)) for x in xs)
    peak = max(abs(d.moment_at(x)) for x in xs)
    m0, m1, m2 = d.moment
    if abs(m2) > 1e-12:
        xv = -m1 / (2.0 * m2)  # vertex of the parabola
        if 0.0 <= xv <= d.length:
            peak = max(peak, abs(d.moment_at(xv)))
    return peak


def _draw_diagrams(cv: _Canvas, m: TopologyModel, spec: RenderSpec,
                   result: AnalysisResult, loads: LoadSet, max_dim: float) -> None:
    color, _ = _DIAGRAM_STYLE[spec.kind]
    node = {n.id: n for n in m.nodes}
    elem = {e.id: e for e in m.elements}
    diagrams = internal_forces(result, m, loads)
    vmax = max((_diagram_peak(d, spec.kind) for d in diagrams), default=0.0)
    world_per_unit = 0.0
    if vmax > 1e-12:
        world_per_unit = spec.ordinate_fraction * max_dim / vmax
    for d in diagrams:
        e = elem[d.element_id]
        a, b = node[e.node_i], node[e.node_j]
        length = math.hypot(b.x - a.x, b.y - a.y)
        if length < 1e-9:
            continue
        ex = (b.x - a.x) / length
        ey = (b.y - a.y) / length
        nx, ny = -ey, ex  # local +y
        pts = [(a.x, a.y)]
        for x in d.stations:
            if spec.kind is RenderKind.AXIAL:
                v = d.axial
            elif spec.kind is RenderKind.SHEAR:
                v = d.shear_at(x)
            else:
                v = d.moment_at(x)
            off = v * world_per_unit
            pts.append((a.x + ex * x + nx * off, a.y + ey * x + ny * off))
        pts.append((b.x, b.y))
        cv.polygon(pts, color, 1.5)
