"""Planar bivariate-bicycle codes on a square lattice.

Qubits live on the edges of the lattice. An edge is labelled
``(kind, x, y)`` where ``kind`` is ``"h"`` for the horizontal edge leaving
vertex ``(x, y)`` to the right and ``"v"`` for the vertical edge leaving it
upwards. A template stabilizer is a list of edge offsets relative to the
vertex where it is placed; X templates are placed at every point of
``region_x`` and Z templates at every point of ``region_z``.

Stabilizer supports are first intersected with the qubit set (edges touched
by both an X and a Z placement) and then the cutting rule is applied until
nothing changes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

from .gf2 import BitMatrix, BitVector, _Reducer, rank, rref

__all__ = [
    "Rect",
    "Offset",
    "TemplateSpec",
    "PlanarBBSpec",
    "CssCode",
    "LogicalBasis",
    "Layout",
    "CodeError",
    "build_planar_bb",
    "place_stabilizers",
    "validate_css",
    "logical_count",
    "canonical_logicals",
    "reduce_weight",
    "cutting_rule",
    "css_from_matrices",
    "load_config",
    "spec_from_dict",
    "bundled_config",
]

Offset = tuple[int, int, str]
Label = tuple[str, int, int]
Point = tuple[int, int]


class CodeError(ValueError):
    """Raised for invalid code specifications or construction failures."""


# ---------------------------------------------------------------------------
# geometry


@dataclass(frozen=True)
class Rect:
    """Axis-aligned block of lattice points ``[x0, x0+width) x [y0, y0+height)``."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise CodeError(f"degenerate rectangle {self}")

    @property
    def x1(self) -> int:
        return self.x0 + self.width

    @property
    def y1(self) -> int:
        return self.y0 + self.height

    def points(self) -> list[Point]:
        # row-major: y outer, x inner
        return [(x, y) for y in range(self.y0, self.y1) for x in range(self.x0, self.x1)]

    def contains(self, p: Point) -> bool:
        return self.x0 <= p[0] < self.x1 and self.y0 <= p[1] < self.y1

    def shifted(self, dx: int, dy: int) -> "Rect":
        return Rect(self.x0 + dx, self.y0 + dy, self.width, self.height)

    def transposed(self) -> "Rect":
        return Rect(self.y0, self.x0, self.height, self.width)

    def to_dict(self) -> dict:
        return {"origin": [self.x0, self.y0], "width": self.width, "height": self.height}

    @classmethod
    def from_dict(cls, d: dict) -> "Rect":
        try:
            x0, y0 = d["origin"]
            return cls(int(x0), int(y0), int(d["width"]), int(d["height"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise CodeError(f"bad rectangle {d!r}: {exc}") from None


def label_key(q: Label) -> tuple[int, int, int]:
    """Row-major sort key for qubit labels; h before v at the same vertex."""
    kind, x, y = q
    return (y, x, 0 if kind == "h" else 1)


def point_key(p: Point) -> tuple[int, int]:
    return (p[1], p[0])


# ---------------------------------------------------------------------------
# specs


@dataclass(frozen=True)
class TemplateSpec:
    x_offsets: tuple[Offset, ...]
    z_offsets: tuple[Offset, ...]
    tile_size: int = 3

    def __post_init__(self):
        if not self.x_offsets or not self.z_offsets:
            raise CodeError("template offset sets must be non-empty")
        if self.tile_size < 1:
            raise CodeError("tile_size must be >= 1")
        for off in self.x_offsets + self.z_offsets:
            if len(off) != 3 or off[2] not in ("h", "v"):
                raise CodeError(f"bad offset {off!r}; expected [dx, dy, 'h'|'v']")

    def dual(self) -> "TemplateSpec":
        return TemplateSpec(self.z_offsets, self.x_offsets, self.tile_size)

    def transposed(self) -> "TemplateSpec":
        """Mirror across the diagonal; h and v edges swap."""
        swap = {"h": "v", "v": "h"}

        def t(offs):
            return tuple((dy, dx, swap[k]) for dx, dy, k in offs)

        return TemplateSpec(t(self.x_offsets), t(self.z_offsets), self.tile_size)


@dataclass(frozen=True)
class PlanarBBSpec:
    template: TemplateSpec
    region_x: Rect
    region_z: Rect
    name: str = ""
    extra: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        rx, rz = self.region_x, self.region_z
        if rx.x1 <= rz.x0 or rz.x1 <= rx.x0 or rx.y1 <= rz.y0 or rz.y1 <= rx.y0:
            raise CodeError("region_x and region_z do not overlap")

    def dual(self) -> "PlanarBBSpec":
        return replace(self, template=self.template.dual(), region_x=self.region_z, region_z=self.region_x)

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "tile_size": self.template.tile_size,
            "x_offsets": [list(o) for o in self.template.x_offsets],
            "z_offsets": [list(o) for o in self.template.z_offsets],
            "region_x": self.region_x.to_dict(),
            "region_z": self.region_z.to_dict(),
        }
        d.update(self.extra)
        return d


# ---------------------------------------------------------------------------
# codes


@dataclass(frozen=True)
class CssCode:
    """CSS code with lattice coordinates attached to every column and row.

    ``qubit_coords`` are edge labels, ``xstab_coords``/``zstab_coords`` the
    lattice points where each check was placed. ``spec`` is set for codes
    built from a planar configuration and carries the geometry needed by
    the surgery routines.
    """

    h_x: BitMatrix
    h_z: BitMatrix
    qubit_coords: tuple = ()
    xstab_coords: tuple = ()
    zstab_coords: tuple = ()
    spec: PlanarBBSpec | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        if self.h_x.cols != self.h_z.cols:
            raise CodeError("h_x and h_z have different column counts")
        if self.qubit_coords and len(self.qubit_coords) != self.h_x.cols:
            raise CodeError("qubit_coords length does not match n")
        if self.xstab_coords and len(self.xstab_coords) != self.h_x.rows:
            raise CodeError("xstab_coords length does not match h_x")
        if self.zstab_coords and len(self.zstab_coords) != self.h_z.rows:
            raise CodeError("zstab_coords length does not match h_z")

    @property
    def n(self) -> int:
        return self.h_x.cols

    @property
    def k(self) -> int:
        return logical_count(self)

    def dual(self) -> "CssCode":
        """Swap the roles of X and Z."""
        return CssCode(
            self.h_z, self.h_x, self.qubit_coords, self.zstab_coords, self.xstab_coords,
            self.spec.dual() if self.spec is not None else None, dict(self.meta),
        )

    def column_of(self) -> dict:
        return {q: i for i, q in enumerate(self.qubit_coords)}


def css_from_matrices(h_x: BitMatrix, h_z: BitMatrix) -> CssCode:
    """Bare code without lattice data (fixtures, external matrices)."""
    return CssCode(h_x, h_z)


@dataclass(frozen=True)
class LogicalBasis:
    j_x: BitMatrix
    j_z: BitMatrix

    @property
    def k(self) -> int:
        return self.j_x.rows

    def pairing(self) -> BitMatrix:
        return self.j_x @ self.j_z.T

    def dual(self) -> "LogicalBasis":
        return LogicalBasis(self.j_z, self.j_x)

    def target(self, spec: str) -> BitVector:
        """Parse ``"X0"``, ``"X0X1"`` or ``"Z2"`` into the product of basis rows."""
        kind, idx = parse_target(spec)
        mat = self.j_x if kind == "X" else self.j_z
        v = BitVector.zeros(mat.cols)
        for i in idx:
            if not 0 <= i < self.k:
                raise CodeError(f"logical index {i} out of range 0..{self.k - 1}")
            v = v + mat.row(i)
        return v


def parse_target(spec: str) -> tuple[str, list[int]]:
    """``"X0X1"`` -> ``("X", [0, 1])``. Mixed types are rejected."""
    import re

    parts = re.findall(r"([XZ])(\d+)", spec.strip())
    if not parts or "".join(f"{a}{b}" for a, b in parts) != spec.strip():
        raise CodeError(f"cannot parse logical target {spec!r}")
    kinds = {a for a, _ in parts}
    if len(kinds) != 1:
        raise CodeError(f"mixed X/Z target {spec!r}")
    idx = [int(b) for _, b in parts]
    if len(set(idx)) != len(idx):
        raise CodeError(f"repeated index in target {spec!r}")
    return kinds.pop(), idx


@dataclass(frozen=True)
class Layout:
    """Everything that was placed before pruning, for rendering.

    ``qubits``/``x_points``/``z_points`` hold every candidate element; the
    ``active_*`` sets say which of them survived into the code.
    """

    qubits: tuple
    x_points: tuple
    z_points: tuple
    active_qubits: frozenset
    active_x: frozenset
    active_z: frozenset


# ---------------------------------------------------------------------------
# construction


def _support(point: Point, offsets: Iterable[Offset]) -> set[Label]:
    x, y = point
    return {(k, x + dx, y + dy) for dx, dy, k in offsets}


def place_stabilizers(
    template: TemplateSpec, x_points: Iterable[Point], z_points: Iterable[Point]
) -> tuple[dict, dict]:
    """Raw (uncut) supports of every X and Z placement."""
    xs = {p: _support(p, template.x_offsets) for p in x_points}
    zs = {p: _support(p, template.z_offsets) for p in z_points}
    return xs, zs


def cut_supports(xs: dict, zs: dict, keep: set | None = None) -> tuple[dict, dict, set]:
    """Intersect supports with the qubit set and prune to a fixpoint.

    A qubit survives only if it is touched by at least one X and one Z
    check; checks left empty are dropped. ``keep`` may pin qubits that must
    never be removed (their presence is then checked by the caller).
    """
    xs = {p: set(s) for p, s in xs.items()}
    zs = {p: set(s) for p, s in zs.items()}
    while True:
        in_x = set().union(*xs.values()) if xs else set()
        in_z = set().union(*zs.values()) if zs else set()
        qubits = in_x & in_z
        changed = False
        for table in (xs, zs):
            for p in list(table):
                s = table[p]
                t = s & qubits
                if t != s:
                    changed = True
                if not t:
                    del table[p]
                    changed = True
                else:
                    table[p] = t
        if not changed:
            return xs, zs, qubits


def code_from_supports(
    xs: dict, zs: dict, qubit_order: Sequence[Label] | None = None,
    x_order: Sequence[Point] | None = None, z_order: Sequence[Point] | None = None,
    spec: PlanarBBSpec | None = None, check: bool = True,
) -> CssCode:
    qubits = set().union(*xs.values(), *zs.values()) if (xs or zs) else set()
    if qubit_order is None:
        qubit_order = sorted(qubits, key=label_key)
    col = {q: i for i, q in enumerate(qubit_order)}
    if x_order is None:
        x_order = sorted(xs, key=point_key)
    if z_order is None:
        z_order = sorted(zs, key=point_key)
    n = len(qubit_order)
    h_x = BitMatrix.from_supports([[col[q] for q in xs[p]] for p in x_order], n)
    h_z = BitMatrix.from_supports([[col[q] for q in zs[p]] for p in z_order], n)
    code = CssCode(h_x, h_z, tuple(qubit_order), tuple(x_order), tuple(z_order), spec)
    if check:
        _check_commute(code)
    return code


def _check_commute(code: CssCode):
    zrows = code.h_z.int_rows
    for i, rx in enumerate(code.h_x.int_rows):
        for j, rz in enumerate(zrows):
            if (rx & rz).bit_count() & 1:
                px = code.xstab_coords[i] if code.xstab_coords else i
                pz = code.zstab_coords[j] if code.zstab_coords else j
                raise CodeError(f"templates do not commute: X check at {px} anticommutes with Z check at {pz}")


def build_planar_bb(spec: PlanarBBSpec) -> tuple[CssCode, Layout]:
    """Place both templates over their regions and apply the cutting rule."""
    xs0, zs0 = place_stabilizers(spec.template, spec.region_x.points(), spec.region_z.points())
    xs, zs, qubits = cut_supports(xs0, zs0)
    if not qubits:
        raise CodeError("empty qubit set: the regions share no qubit touched by both check types")
    code = code_from_supports(xs, zs, spec=spec)
    all_q = set().union(*xs0.values(), *zs0.values())
    layout = Layout(
        qubits=tuple(sorted(all_q, key=label_key)),
        x_points=tuple(spec.region_x.points()),
        z_points=tuple(spec.region_z.points()),
        active_qubits=frozenset(qubits),
        active_x=frozenset(xs),
        active_z=frozenset(zs),
    )
    return code, layout


def cutting_rule(code: CssCode) -> CssCode:
    """Matrix-level cutting rule iterated to a fixpoint.

    Drops every column that is zero in ``h_x`` or in ``h_z``, then every row
    that became zero, and repeats. Coordinates follow the kept elements.
    """
    hx, hz = code.h_x, code.h_z
    cols = list(range(code.n))
    xr = list(range(hx.rows))
    zr = list(range(hz.rows))
    while True:
        mx = 0
        for i in xr:
            mx |= hx.int_rows[i]
        mz = 0
        for i in zr:
            mz |= hz.int_rows[i]
        keep = mx & mz
        new_cols = [c for c in cols if keep >> c & 1]
        cm = 0
        for c in new_cols:
            cm |= 1 << c
        new_xr = [i for i in xr if hx.int_rows[i] & cm]
        new_zr = [i for i in zr if hz.int_rows[i] & cm]
        if new_cols == cols and new_xr == xr and new_zr == zr:
            break
        cols, xr, zr = new_cols, new_xr, new_zr
    if cols == list(range(code.n)) and len(xr) == hx.rows and len(zr) == hz.rows:
        return code
    h_x = hx.select_rows(xr).select_columns(cols)
    h_z = hz.select_rows(zr).select_columns(cols)
    qc = tuple(code.qubit_coords[c] for c in cols) if code.qubit_coords else ()
    xc = tuple(code.xstab_coords[i] for i in xr) if code.xstab_coords else ()
    zc = tuple(code.zstab_coords[i] for i in zr) if code.zstab_coords else ()
    return CssCode(h_x, h_z, qc, xc, zc, code.spec, dict(code.meta))


def validate_css(code: CssCode) -> bool:
    """True when every X check commutes with every Z check."""
    zrows = code.h_z.int_rows
    return all(not ((rx & rz).bit_count() & 1) for rx in code.h_x.int_rows for rz in zrows)


def logical_count(code: CssCode) -> int:
    return code.n - rank(code.h_x) - rank(code.h_z)


# ---------------------------------------------------------------------------
# logical operators


def _quotient_reps(kernel_rows: Sequence[int], stab_rows: Sequence[int]) -> list[int]:
    """Kernel vectors independent modulo the stabilizer row space, in order."""
    red = _Reducer(stab_rows)
    out = []
    for v in kernel_rows:
        if red.add(v):
            out.append(v)
    return out


def reduce_weight(v: int, rows: Sequence[int]) -> int:
    """Greedy descent: add single stabilizer rows while the weight drops."""
    w = v.bit_count()
    improved = True
    while improved:
        improved = False
        for r in rows:
            u = v ^ r
            uw = u.bit_count()
            if uw < w:
                v, w = u, uw
                improved = True
    return v


def _gf2_inverse(m: BitMatrix) -> BitMatrix:
    red, piv, trans = rref(m)
    if len(piv) != m.rows or m.rows != m.cols:
        raise CodeError("pairing matrix is singular")
    # transform @ m == identity (rows already in pivot order)
    return trans


def canonical_logicals(code: CssCode) -> LogicalBasis:
    """Deterministic logical basis with ``j_x · j_zᵀ = I``.

    X logicals are kernel vectors of ``h_z`` that are independent modulo
    the X stabilizers, taken in kernel-basis order and shortened by greedy
    stabilizer addition. Z logicals are then rotated so that the pairing
    matrix is the identity.
    """
    from .gf2 import kernel_basis

    k = logical_count(code)
    if k == 0:
        raise CodeError("no logical qubits")
    hx_rows = code.h_x.int_rows
    hz_rows = code.h_z.int_rows
    xs = _quotient_reps(kernel_basis(code.h_z).int_rows, hx_rows)
    zs = _quotient_reps(kernel_basis(code.h_x).int_rows, hz_rows)
    assert len(xs) == k and len(zs) == k
    xs = [reduce_weight(v, hx_rows) for v in xs]
    j_x = BitMatrix(xs, code.n)
    j_z = BitMatrix(zs, code.n)
    p = j_x @ j_z.T
    m = _gf2_inverse(p).T
    j_z = m @ j_z
    j_z = BitMatrix([reduce_weight(v, hz_rows) for v in j_z.int_rows], code.n)
    basis = LogicalBasis(j_x, j_z)
    assert basis.pairing() == BitMatrix.identity(k)
    return basis


def check_basis(code: CssCode, basis: LogicalBasis) -> None:
    """Raise if ``basis`` is not a valid paired logical basis of ``code``."""
    k = logical_count(code)
    if basis.k != k or basis.j_z.rows != k:
        raise CodeError(f"basis has {basis.k} pairs, code has k={k}")
    if not (code.h_z @ basis.j_x.T).is_zero() or not (code.h_x @ basis.j_z.T).is_zero():
        raise CodeError("basis vectors are not in the check kernels")
    if rank(BitMatrix.vstack(code.h_x, basis.j_x)) != rank(code.h_x) + k:
        raise CodeError("X logicals are dependent modulo stabilizers")
    if rank(BitMatrix.vstack(code.h_z, basis.j_z)) != rank(code.h_z) + k:
        raise CodeError("Z logicals are dependent modulo stabilizers")
    if basis.pairing() != BitMatrix.identity(k):
        raise CodeError("pairing matrix is not the identity")


# ---------------------------------------------------------------------------
# configuration files

_CONFIG_DIR = Path(__file__).with_name("codes")


def _offsets(raw, name) -> tuple[Offset, ...]:
    if not isinstance(raw, list) or not raw:
        raise CodeError(f"{name} must be a non-empty list of [dx, dy, 'h'|'v']")
    out = []
    for o in raw:
        if not isinstance(o, (list, tuple)) or len(o) != 3:
            raise CodeError(f"{name}: bad entry {o!r}")
        dx, dy, kind = o
        if not isinstance(dx, int) or not isinstance(dy, int) or kind not in ("h", "v"):
            raise CodeError(f"{name}: bad entry {o!r}")
        out.append((dx, dy, kind))
    return tuple(out)


def spec_from_dict(d: dict) -> PlanarBBSpec:
    if not isinstance(d, dict):
        raise CodeError("config must be a JSON object")
    for key in ("x_offsets", "z_offsets", "region_x", "region_z"):
        if key not in d:
            raise CodeError(f"config is missing required field {key!r}")
    tile = d.get("tile_size", 3)
    if not isinstance(tile, int):
        raise CodeError("tile_size must be an integer")
    template = TemplateSpec(_offsets(d["x_offsets"], "x_offsets"), _offsets(d["z_offsets"], "z_offsets"), tile)
    known = {"name", "tile_size", "x_offsets", "z_offsets", "region_x", "region_z"}
    extra = {k: v for k, v in d.items() if k not in known}
    return PlanarBBSpec(template, Rect.from_dict(d["region_x"]), Rect.from_dict(d["region_z"]),
                        str(d.get("name", "")), extra)


def bundled_config(name: str) -> Path:
    """Path of a config shipped with the package, e.g. ``"54"`` or ``"codes/54.json"``."""
    p = Path(name)
    stem = p.stem if p.suffix == ".json" else p.name
    path = _CONFIG_DIR / f"{stem}.json"
    if not path.exists():
        raise CodeError(f"no bundled config named {name!r}")
    return path


def load_config(path: str | Path) -> PlanarBBSpec:
    """Read a config from ``path``; falls back to the bundled ``codes/`` directory."""
    p = Path(path)
    if not p.exists():
        try:
            p = bundled_config(str(path))
        except CodeError:
            raise CodeError(f"config file not found: {path}") from None
    try:
        d = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise CodeError(f"{p}: invalid JSON: {exc}") from None
    return spec_from_dict(d)
