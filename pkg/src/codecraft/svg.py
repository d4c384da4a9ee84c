"""SVG lattice diagrams.

Qubits are lattice edges: ``("h", x, y)`` joins (x, y) to (x+1, y) and
``("v", x, y)`` joins (x, y) to (x, y+1). Checks are circles at their
lattice points: X red, Z blue, black where an X and a Z check share a
point. Elements that were placed but pruned are drawn in gray.

Every glyph carries CSS classes so that counts can be checked:
``qubit``, ``stab x``, ``stab z``, plus ``removed`` for gray ones.
"""

from __future__ import annotations

import re
from xml.sax.saxutils import escape

from .bb import CodeError, CssCode
from .craft import DeformedCode

__all__ = ["render_svg", "glyph_counts"]

SCALE = 24
MARGIN = 20
STYLE = """
.qubit { stroke: #222; stroke-width: 3; }
.qubit.ancilla { stroke: #8a5a00; }
.stab { stroke: none; }
.stab.x { fill: #d62728; }
.stab.z { fill: #1f77b4; }
.stab.both { fill: #000; }
.removed { stroke: #ccc; fill: #ccc; }
"""


def _elements(obj):
    if isinstance(obj, DeformedCode):
        return obj.qubit_coords, obj.xstab_coords, obj.zstab_coords, set(obj.ancilla_coords)
    if isinstance(obj, CssCode):
        return obj.qubit_coords, obj.xstab_coords, obj.zstab_coords, set()
    raise CodeError(f"cannot render {type(obj).__name__}")


def _removed(obj, qs, xs, zs, layout=None):
    """Placed-but-pruned elements from ``layout`` and ``meta``."""
    rq, rx, rz = set(), set(), set()
    meta = getattr(obj, "meta", {}) or {}
    sources = []
    if layout is not None:
        sources.append((layout.qubits, layout.x_points, layout.z_points))
    if meta.get("layout") is not None:
        lay = meta["layout"]
        sources.append((lay.qubits, lay.x_points, lay.z_points))
    inter = meta.get("intermediate")
    if inter is not None:
        sources.append((inter.qubit_coords, inter.xstab_coords, inter.zstab_coords))
        lay = inter.meta.get("layout")
        if lay is not None:
            sources.append((lay.qubits, lay.x_points, lay.z_points))
    sq, sx, sz = set(qs), set(xs), set(zs)
    for q, x, z in sources:
        rq |= set(q) - sq
        rx |= set(x) - sx
        rz |= set(z) - sz
    return sorted(rq), sorted(rx), sorted(rz)


def render_svg(obj, title: str | None = None, layout=None) -> str:
    """SVG document for a ``CssCode`` or ``DeformedCode`` with coordinates.

    ``layout`` (from ``build_planar_bb``) adds the pruned placements in gray.
    """
    qs, xs, zs, anc = _elements(obj)
    if not qs:
        raise CodeError("nothing to render: the code has no qubit coordinates")
    hx, hz = (obj.hbar_x, obj.hbar_z) if isinstance(obj, DeformedCode) else (obj.h_x, obj.h_z)
    if len(qs) != hx.cols or len(xs) != hx.rows or len(zs) != hz.rows:
        raise CodeError("coordinates do not match the matrices")
    rq, rx, rz = _removed(obj, qs, xs, zs, layout)
    pts = [(x, y) for _, x, y in list(qs) + rq] + list(xs) + list(zs) + rx + rz
    x0 = min(p[0] for p in pts)
    y0 = min(p[1] for p in pts)
    x1 = max(p[0] for p in pts) + 1
    y1 = max(p[1] for p in pts) + 1

    def X(x):
        return MARGIN + (x - x0) * SCALE

    def Y(y):  # y grows upwards on the lattice
        return MARGIN + (y1 - y) * SCALE

    w = 2 * MARGIN + (x1 - x0) * SCALE
    h = 2 * MARGIN + (y1 - y0) * SCALE
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">']
    if title:
        out.append(f"<title>{escape(title)}</title>")
    out.append(f"<style>{STYLE}</style>")

    def edge(q, cls):
        k, x, y = q
        xe, ye = (x + 1, y) if k == "h" else (x, y + 1)
        out.append(f'<line class="{cls}" x1="{X(x)}" y1="{Y(y)}" x2="{X(xe)}" y2="{Y(ye)}"><title>{k}{x},{y}</title></line>')

    def circle(p, cls, r):
        out.append(f'<circle class="{cls}" cx="{X(p[0])}" cy="{Y(p[1])}" r="{r}"/>')

    for q in rq:
        edge(q, "qubit removed")
    for p in rx:
        circle(p, "stab x removed", 5)
    for p in rz:
        circle(p, "stab z removed", 5)
    for q in qs:
        edge(q, "qubit ancilla" if q in anc else "qubit")
    both = set(xs) & set(zs)
    for p in xs:
        circle(p, "stab x both" if p in both else "stab x", 6)
    for p in zs:
        circle(p, "stab z both" if p in both else "stab z", 4)
    out.append("</svg>")
    return "\n".join(out) + "\n"


def glyph_counts(svg: str) -> dict:
    """Active and removed glyph counts by class, read back from the markup."""
    counts = {"qubit": 0, "x": 0, "z": 0, "removed_qubit": 0, "removed_x": 0, "removed_z": 0}
    for tag, cls in re.findall(r'<(line|circle) class="([^"]*)"', svg):
        c = cls.split()
        key = "qubit" if tag == "line" else ("x" if "x" in c else "z")
        counts[("removed_" + key) if "removed" in c else key] += 1
    return counts
