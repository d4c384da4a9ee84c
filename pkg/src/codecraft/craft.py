"""Deformed codes for logical measurement: stretch, Z cut, channels, X cut.

The X pipeline moves one rough boundary of a planar code outwards, removes
the Z checks along the moved boundary so that no logical survives, and
then keeps only the new X checks that take part in the measurement channel
of the target. Z targets are handled by running the same pipeline on the
dual code.

Column order of every deformed code is: base qubits in base order, then
ancilla qubits in row-major lattice order. Rows start with the base checks
in base order, so the zero blocks

    hbar_x = [[H_X, 0], [S, H_Gᵀ]]      hbar_z = [[H_Z, T], [0, H_M]]

can be read off by slicing. For Z-type codes the two matrices swap roles.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .bb import (
    CodeError,
    CssCode,
    LogicalBasis,
    PlanarBBSpec,
    Rect,
    build_planar_bb,
    label_key,
    point_key,
)
from .gf2 import BitMatrix, BitVector, _Reducer, rank, solve_left

__all__ = [
    "CraftError",
    "DeformedCode",
    "MeasurementChannel",
    "StretchParams",
    "rough_directions",
    "stretch",
    "z_cut",
    "as_intermediate",
    "prepare_intermediate",
    "minimal_length",
    "length_for_ancilla",
    "measurement_channel",
    "x_cut",
    "direct_sum",
    "joint_connect",
    "z_pipeline_by_duality",
    "direct_sum_basis",
    "two_block_pipeline",
    "x_pipeline",
    "choose_unmeasured",
    "target_coefficients",
]


class CraftError(CodeError):
    """Raised when a deformation step cannot be carried out."""


@dataclass(frozen=True)
class StretchParams:
    """Which rough boundary moves, and by how many lattice columns."""

    direction: str
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise CraftError("stretch length must be >= 1")


@dataclass(frozen=True)
class MeasurementChannel:
    g: BitVector
    target: BitVector
    n_old: int

    @property
    def g_old(self) -> BitVector:
        return self.g.select(range(self.n_old))

    @property
    def g_new(self) -> BitVector:
        return self.g.select(range(self.n_old, self.g.len))


@dataclass(frozen=True)
class DeformedCode:
    """Base code merged with an ancilla system.

    ``kind`` says which logical type is measured. For ``"X"`` the matrices
    have the block form in the module docstring; for ``"Z"`` the roles of
    ``hbar_x`` and ``hbar_z`` are exchanged.
    """

    base: CssCode
    hbar_x: BitMatrix
    hbar_z: BitMatrix
    qubit_coords: tuple
    xstab_coords: tuple
    zstab_coords: tuple
    kind: str = "X"
    g_mask: BitVector | None = None
    target: BitVector | None = None
    unmeasured: BitMatrix | None = None
    meta: dict = field(default_factory=dict, compare=False, hash=False)

    @property
    def n(self) -> int:
        return self.hbar_x.cols

    @property
    def n_base(self) -> int:
        return self.base.n

    @property
    def ancilla_range(self) -> range:
        return range(self.base.n, self.n)

    @property
    def ancilla_size(self) -> int:
        return self.n - self.base.n

    @property
    def ancilla_coords(self) -> tuple:
        return self.qubit_coords[self.base.n:]

    # the "measured" side is hbar_x for X codes, hbar_z for Z codes
    def _meas(self):
        return (self.hbar_x, self.hbar_z) if self.kind == "X" else (self.hbar_z, self.hbar_x)

    def _base_meas(self):
        b = self.base
        return (b.h_x, b.h_z) if self.kind == "X" else (b.h_z, b.h_x)

    def blocks(self) -> dict:
        """The named sub-blocks ``H_X, S, H_Gᵀ, H_Z, T, H_M`` (measured side first)."""
        hm, ho = self._meas()
        bm, bo = self._base_meas()
        n, r1, r2 = self.base.n, bm.rows, bo.rows
        base_cols, anc = list(range(n)), list(self.ancilla_range)
        new_m = list(range(r1, hm.rows))
        new_o = list(range(r2, ho.rows))
        return {
            "H_X": hm.select_rows(range(r1)).select_columns(base_cols),
            "0_top": hm.select_rows(range(r1)).select_columns(anc),
            "S": hm.select_rows(new_m).select_columns(base_cols),
            "H_G^T": hm.select_rows(new_m).select_columns(anc),
            "H_Z": ho.select_rows(range(r2)).select_columns(base_cols),
            "T": ho.select_rows(range(r2)).select_columns(anc),
            "0_bottom": ho.select_rows(new_o).select_columns(base_cols),
            "H_M": ho.select_rows(new_o).select_columns(anc),
        }

    def check(self) -> None:
        """Raise unless commutation and the zero blocks hold exactly."""
        if not (self.hbar_x @ self.hbar_z.T).is_zero():
            raise CraftError("deformed checks do not commute")
        bl = self.blocks()
        bm, bo = self._base_meas()
        if bl["H_X"] != bm or bl["H_Z"] != bo:
            raise CraftError("base check blocks differ from the base code")
        if not bl["0_top"].is_zero():
            raise CraftError("base measured-side checks touch ancilla qubits")
        if not bl["0_bottom"].is_zero():
            raise CraftError("new checks of the other type touch base qubits")

    def dual(self) -> "DeformedCode":
        return DeformedCode(
            self.base.dual(), self.hbar_z, self.hbar_x, self.qubit_coords,
            self.zstab_coords, self.xstab_coords, "Z" if self.kind == "X" else "X",
            self.g_mask, self.target, self.unmeasured, dict(self.meta),
        )

    def as_x_type(self) -> "DeformedCode":
        """Same code viewed so that the measured type is X."""
        return self if self.kind == "X" else self.dual()

    def as_css(self) -> CssCode:
        return CssCode(self.hbar_x, self.hbar_z, self.qubit_coords, self.xstab_coords, self.zstab_coords)


# ---------------------------------------------------------------------------
# geometry


def rough_directions(spec: PlanarBBSpec) -> tuple[str, str]:
    """Directions in which the Z region overhangs the X region."""
    rx, rz = spec.region_x, spec.region_z
    if rz.x0 < rx.x0 and rz.x1 > rx.x1:
        return ("left", "right")
    if rz.y0 < rx.y0 and rz.y1 > rx.y1:
        return ("bottom", "top")
    raise CraftError("cannot identify rough boundaries: Z region does not overhang X region on two opposite sides")


def _grow(r: Rect, direction: str, length: int) -> Rect:
    if direction == "right":
        return Rect(r.x0, r.y0, r.width + length, r.height)
    if direction == "left":
        return Rect(r.x0 - length, r.y0, r.width + length, r.height)
    if direction == "top":
        return Rect(r.x0, r.y0, r.width, r.height + length)
    if direction == "bottom":
        return Rect(r.x0, r.y0 - length, r.width, r.height + length)
    raise CraftError(f"unknown direction {direction!r}")


def stretch(code: CssCode, p: StretchParams) -> CssCode:
    """Extend both regions across one rough boundary by ``p.length`` lattice steps."""
    spec = code.spec
    if spec is None:
        raise CraftError("stretch needs a code built from a planar config")
    if p.direction not in rough_directions(spec):
        raise CraftError(f"{p.direction!r} is not a rough boundary; choose one of {rough_directions(spec)}")
    new = replace(spec, region_x=_grow(spec.region_x, p.direction, p.length),
                  region_z=_grow(spec.region_z, p.direction, p.length))
    out, layout = build_planar_bb(new)
    meta = {"moved": p.direction, "length": p.length, "layout": layout}
    return replace(out, meta=meta)


def _z_cut_region(spec: PlanarBBSpec, direction: str, tile: int) -> Rect:
    rx, rz = spec.region_x, spec.region_z
    # Drop the overhanging Z rows/columns plus tile-1 bulk ones behind them.
    if direction == "right":
        x1 = rx.x1 - (tile - 1)
        return Rect(rz.x0, rz.y0, x1 - rz.x0, rz.height)
    if direction == "left":
        x0 = rx.x0 + (tile - 1)
        return Rect(x0, rz.y0, rz.x1 - x0, rz.height)
    if direction == "top":
        y1 = rx.y1 - (tile - 1)
        return Rect(rz.x0, rz.y0, rz.width, y1 - rz.y0)
    y0 = rx.y0 + (tile - 1)
    return Rect(rz.x0, y0, rz.width, rz.y1 - y0)


def z_cut(code: CssCode, tile_size: int) -> CssCode:
    """Remove the Z checks along the moved boundary and re-apply the cutting rule."""
    spec = code.spec
    if spec is None or "moved" not in code.meta:
        raise CraftError("z_cut needs a stretched code (no moved boundary recorded)")
    if tile_size != spec.template.tile_size:
        raise CraftError(f"tile_size {tile_size} does not match template tile size {spec.template.tile_size}")
    direction = code.meta["moved"]
    try:
        region = _z_cut_region(spec, direction, tile_size)
    except CodeError:
        raise CraftError("stretch too short: Z cut removes the whole Z region") from None
    new = replace(spec, region_z=region)
    out, _ = build_planar_bb(new)
    meta = dict(code.meta)
    meta["z_cut"] = tile_size
    meta["layout"] = _merge_layout(code.meta.get("layout"), out)
    return replace(out, meta=meta)


def _merge_layout(layout, code: CssCode):
    """Keep the pre-cut placements of ``layout`` but mark what survives in ``code``."""
    if layout is None:
        return None
    return replace(
        layout,
        active_qubits=frozenset(code.qubit_coords),
        active_x=frozenset(code.xstab_coords),
        active_z=frozenset(code.zstab_coords),
    )


def as_intermediate(base: CssCode, merged: CssCode, kind: str = "X", meta: dict | None = None) -> DeformedCode:
    """Reorder ``merged`` into block form relative to ``base``.

    Base qubits and checks are matched by lattice label. Raises if a base
    qubit or check is missing or if a zero block is violated.
    """
    col = merged.column_of()
    missing = [q for q in base.qubit_coords if q not in col]
    if missing:
        raise CraftError(f"{len(missing)} base qubits were removed, e.g. {missing[0]}")
    base_set = set(base.qubit_coords)
    anc = sorted((q for q in merged.qubit_coords if q not in base_set), key=label_key)
    order = list(base.qubit_coords) + anc
    perm = [col[q] for q in order]

    def rows_for(h: BitMatrix, coords: tuple, base_coords: tuple):
        where = {p: i for i, p in enumerate(coords)}
        lost = [p for p in base_coords if p not in where]
        if lost:
            raise CraftError(f"base check at {lost[0]} was removed")
        base_rows = [where[p] for p in base_coords]
        rest = sorted((p for p in coords if p not in set(base_coords)), key=point_key)
        idx = base_rows + [where[p] for p in rest]
        return h.select_rows(idx).select_columns(perm), tuple(base_coords) + tuple(rest)

    hx, xc = rows_for(merged.h_x, merged.xstab_coords, base.xstab_coords)
    hz, zc = rows_for(merged.h_z, merged.zstab_coords, base.zstab_coords)
    m = dict(merged.meta)
    if meta:
        m.update(meta)
    d = DeformedCode(base, hx, hz, tuple(order), xc, zc, kind, meta=m)
    d.check()
    return d


def prepare_intermediate(code: CssCode, direction: str = "right", length: int | None = None) -> DeformedCode:
    """Stretch, Z cut and reorder. ``length=None`` picks the minimal stretch."""
    if length is None:
        return minimal_length(code, direction)[1]
    s = stretch(code, StretchParams(direction, length))
    cut = z_cut(s, code.spec.template.tile_size)
    return as_intermediate(code, cut, "X", {"direction": direction, "length": length})


def _channels_ok(inter: DeformedCode) -> bool:
    red = _Reducer(inter.hbar_x.int_rows)
    base = inter.base
    from .gf2 import kernel_basis

    for v in kernel_basis(base.h_z).int_rows:
        if not red.contains(v):
            return False
    return True


def minimal_length(code: CssCode, direction: str = "right", max_length: int = 64) -> tuple[int, DeformedCode]:
    """Smallest stretch whose intermediate has block form and a channel for every X logical."""
    last = None
    for length in range(1, max_length + 1):
        try:
            inter = prepare_intermediate(code, direction, length)
        except CraftError as exc:
            last = exc
            continue
        if _channels_ok(inter):
            return length, inter
    raise CraftError(f"no valid stretch up to length {max_length}: {last}")


def length_for_ancilla(code: CssCode, ancilla: int, direction: str = "right", max_length: int = 64) -> int:
    """Stretch length whose intermediate has exactly ``ancilla`` ancilla qubits."""
    seen = []
    for length in range(1, max_length + 1):
        try:
            inter = prepare_intermediate(code, direction, length)
        except CraftError:
            continue
        seen.append(inter.ancilla_size)
        if inter.ancilla_size == ancilla:
            return length
        if inter.ancilla_size > ancilla:
            break
    raise CraftError(f"no stretch gives ancilla size {ancilla}; sizes reachable: {seen}")


# ---------------------------------------------------------------------------
# channels and X cutting


def measurement_channel(inter: DeformedCode, j_x: BitVector) -> MeasurementChannel | None:
    """Rows of ``hbar_x`` whose product is ``(j_x, 0)``, or ``None``."""
    if inter.kind != "X":
        raise CraftError("measurement_channel expects an X-type intermediate; use .dual()")
    if j_x.len != inter.n_base:
        raise CraftError("target length does not match the base code")
    g = solve_left(inter.hbar_x, j_x.concat(BitVector.zeros(inter.ancilla_size)))
    if g is None:
        return None
    return MeasurementChannel(g, j_x, inter.base.h_x.rows)


def target_coefficients(code: CssCode, basis: LogicalBasis, target: BitVector) -> list[int]:
    """Indices ``a`` with ``target ≡ Σ j_x[a]`` modulo X stabilizers."""
    if not code.h_z.mul_vec(target).bits == 0:
        raise CraftError("target does not commute with the Z checks")
    k = basis.k
    # solve over [j_x; h_x]; the j_x part of the solution is unique
    m = BitMatrix.vstack(basis.j_x, code.h_x)
    x = solve_left(m, target)
    if x is None:
        raise CraftError("target is outside the span of the basis X logicals")
    coeffs = [a for a in range(k) if x[a]]
    if not coeffs:
        raise CraftError("target is a stabilizer, not a logical")
    return coeffs


def choose_unmeasured(code: CssCode, basis: LogicalBasis, target: BitVector) -> BitMatrix:
    """k−1 basis X logicals that together with ``target`` span all logicals."""
    target_coefficients(code, basis, target)
    red = _Reducer(code.h_x.int_rows)
    red.add(target.bits)
    keep = [v for v in basis.j_x.int_rows if red.add(v)]
    return BitMatrix(keep, code.n)


def x_cut(inter: DeformedCode, target: BitVector, basis: LogicalBasis) -> DeformedCode:
    """Keep only the new X checks in the target's channel and prune.

    The returned code is verified: ``(target, 0)`` lies in the X check row
    space and no unmeasured basis logical does.
    """
    if inter.kind != "X":
        raise CraftError("x_cut expects an X-type intermediate; use z_pipeline_by_duality for Z targets")
    base = inter.base
    unmeasured = choose_unmeasured(base, basis, target)
    ch = measurement_channel(inter, target)
    if ch is None:
        raise CraftError("no measurement channel for the target in this intermediate")
    n, r_old = base.n, base.h_x.rows
    g_new = ch.g_new
    new_rows = [r_old + i for i in range(g_new.len) if g_new[i]]
    keep_x = list(range(r_old)) + new_rows
    hx = inter.hbar_x.select_rows(keep_x)
    hz = inter.hbar_z
    r_oz = base.h_z.rows
    # Drop ancilla columns that are zero on either side, then emptied rows.
    cols = list(range(inter.n))
    keep_z = list(range(hz.rows))
    rows_x = list(range(hx.rows))
    while True:
        mx = hx.select_rows(rows_x).column_mask()
        mz = hz.select_rows(keep_z).column_mask()
        new_cols = list(range(n)) + [c for c in cols[n:] if (mx & mz) >> c & 1]
        cm = sum(1 << c for c in new_cols)
        new_rx = list(range(r_old)) + [i for i in rows_x[r_old:] if hx.int_rows[i] & cm]
        new_kz = list(range(r_oz)) + [i for i in keep_z[r_oz:] if hz.int_rows[i] & cm]
        if (new_cols, new_rx, new_kz) == (cols, rows_x, keep_z):
            break
        cols, rows_x, keep_z = new_cols, new_rx, new_kz
    keep_x = [keep_x[i] for i in rows_x]
    hx = hx.select_rows(rows_x).select_columns(cols)
    hz = hz.select_rows(keep_z).select_columns(cols)
    xc = tuple(inter.xstab_coords[i] for i in keep_x)
    zc = tuple(inter.zstab_coords[i] for i in keep_z)
    qc = tuple(inter.qubit_coords[c] for c in cols)
    meta = dict(inter.meta)
    meta["intermediate"] = inter
    out = DeformedCode(base, hx, hz, qc, xc, zc, "X", g_new, target, unmeasured, meta)
    out.check()
    _verify_cut(out)
    return out


def _verify_cut(d: DeformedCode) -> None:
    anc0 = BitVector.zeros(d.ancilla_size)
    r = rank(d.hbar_x)
    if rank(d.hbar_x.append_rows([d.target.concat(anc0).bits])) != r:
        raise CraftError("deformed code does not measure the target")
    ext = [v.concat(anc0).bits for v in d.unmeasured]
    # The X checks carry redundant rows, so independence means the rank
    # grows by exactly the number of unmeasured logicals.
    if rank(d.hbar_x.append_rows(ext)) != r + len(ext):
        raise CraftError("deformed code measures non-target logicals")


def x_pipeline(code: CssCode, basis: LogicalBasis, target: BitVector | str,
               direction: str = "right", length: int | None = None) -> DeformedCode:
    if isinstance(target, str):
        target = basis.target(target)
    inter = prepare_intermediate(code, direction, length)
    return x_cut(inter, target, basis)


def z_pipeline_by_duality(code: CssCode, basis: LogicalBasis, target: BitVector | str,
                          direction: str = "top", length: int | None = None) -> DeformedCode:
    """Measure a Z logical by running the X pipeline on the dual code."""
    if isinstance(target, str):
        target = basis.target(target)
    d = x_pipeline(code.dual(), basis.dual(), target, direction, length)
    return d.dual()


# ---------------------------------------------------------------------------
# two blocks


def _shift_label(q, dx, dy):
    return (q[0], q[1] + dx, q[2] + dy)


def direct_sum(a: CssCode, b: CssCode) -> CssCode:
    """Block-diagonal union of two codes with disjoint coordinates."""
    na, nb = a.n, b.n
    z = BitMatrix.zeros
    hx = BitMatrix.block([[a.h_x, z(a.h_x.rows, nb)], [z(b.h_x.rows, na), b.h_x]])
    hz = BitMatrix.block([[a.h_z, z(a.h_z.rows, nb)], [z(b.h_z.rows, na), b.h_z]])
    qc = a.qubit_coords + b.qubit_coords
    if len(set(qc)) != len(qc):
        raise CraftError("blocks overlap")
    return CssCode(hx, hz, qc, a.xstab_coords + b.xstab_coords, a.zstab_coords + b.zstab_coords,
                   None, {"blocks": (na, nb)})


def _shifted_code(code: CssCode, dx: int, dy: int) -> CssCode:
    spec = code.spec
    new_spec = replace(spec, region_x=spec.region_x.shifted(dx, dy), region_z=spec.region_z.shifted(dx, dy))
    return CssCode(
        code.h_x, code.h_z,
        tuple(_shift_label(q, dx, dy) for q in code.qubit_coords),
        tuple((x + dx, y + dy) for x, y in code.xstab_coords),
        tuple((x + dx, y + dy) for x, y in code.zstab_coords),
        new_spec,
    )


def _hull(r: Rect, s: Rect) -> Rect:
    x0, y0 = min(r.x0, s.x0), min(r.y0, s.y0)
    return Rect(x0, y0, max(r.x1, s.x1) - x0, max(r.y1, s.y1) - y0)


def joint_connect(a: CssCode, b: CssCode, orientation: str, separation: int) -> DeformedCode:
    """Place ``b`` next to ``a`` and fill the gap with template checks.

    ``separation`` is the gap between the two X regions. Horizontal
    connection gives an X-type intermediate, vertical a Z-type one.
    """
    if separation < 1:
        raise CraftError("separation must be >= 1")
    if a.spec is None or b.spec is None:
        raise CraftError("joint_connect needs codes built from planar configs")
    if a.spec.template != b.spec.template:
        raise CraftError("incompatible templates")
    sa, sb = a.spec, b.spec
    if (sa.region_x.width, sa.region_x.height, sa.region_z.width, sa.region_z.height) != (
        sb.region_x.width, sb.region_x.height, sb.region_z.width, sb.region_z.height
    ) or (sa.region_z.x0 - sa.region_x.x0, sa.region_z.y0 - sa.region_x.y0) != (
        sb.region_z.x0 - sb.region_x.x0, sb.region_z.y0 - sb.region_x.y0
    ):
        raise CraftError("joint_connect needs two blocks of the same shape")
    if orientation == "horizontal":
        dx, dy, kind = sa.region_x.x1 + separation - sb.region_x.x0, sa.region_x.y0 - sb.region_x.y0, "X"
    elif orientation == "vertical":
        dx, dy, kind = sa.region_x.x0 - sb.region_x.x0, sa.region_x.y1 + separation - sb.region_x.y0, "Z"
    else:
        raise CraftError(f"orientation must be horizontal or vertical, not {orientation!r}")
    b2 = _shifted_code(b, dx, dy)
    base = direct_sum(a, b2)
    merged_spec = replace(sa, region_x=_hull(sa.region_x, b2.spec.region_x),
                          region_z=_hull(sa.region_z, b2.spec.region_z))
    merged, layout = build_planar_bb(merged_spec)
    merged = replace(merged, meta={"layout": layout})
    return as_intermediate(base, merged, kind,
                           {"orientation": orientation, "separation": separation, "blocks": (a.n, b.n)})


def direct_sum_basis(a: LogicalBasis, b: LogicalBasis) -> LogicalBasis:
    """Basis of two side-by-side blocks: logicals of ``a`` first, then ``b``."""
    na, nb = a.j_x.cols, b.j_x.cols
    z = BitMatrix.zeros
    jx = BitMatrix.block([[a.j_x, z(a.k, nb)], [z(b.k, na), b.j_x]])
    jz = BitMatrix.block([[a.j_z, z(a.k, nb)], [z(b.k, na), b.j_z]])
    return LogicalBasis(jx, jz)


def two_block_pipeline(code: CssCode, basis: LogicalBasis, orientation: str, separation: int,
                       first: int, second: int) -> DeformedCode:
    """Measure ``X_first ⊗ X_second`` across a horizontal joint, or
    ``Z_first ⊗ Z_second`` across a vertical one."""
    inter = joint_connect(code, code, orientation, separation)
    pair = direct_sum_basis(basis, basis)
    k = basis.k
    if orientation == "horizontal":
        target = pair.j_x.row(first) + pair.j_x.row(k + second)
        return x_cut(inter, target, pair)
    target = pair.j_z.row(first) + pair.j_z.row(k + second)
    return x_cut(inter.dual(), target, pair.dual()).dual()
