"""Logical basis chosen so that neighbouring blocks can be coupled.

Two copies of a code are joined horizontally (X-type ancilla) and
vertically (Z-type ancilla). The basis is picked so that ``X0 ⊗ X1`` has a
channel through the horizontal joint and ``Z2 ⊗ Z3`` through the vertical
one, then completed to a paired basis.
"""

from __future__ import annotations

from dataclasses import dataclass

from .bb import CodeError, CssCode, LogicalBasis, canonical_logicals, check_basis, reduce_weight
from .craft import DeformedCode, direct_sum_basis, joint_connect
from .gf2 import BitMatrix, BitVector, _Reducer, kernel_basis, rref

__all__ = [
    "JointIntermediates",
    "PairingSolution",
    "BasisError",
    "build_joint_intermediates",
    "three_block_form",
    "joint_channel_space",
    "find_joint_x_pair",
    "joint_x_pairs",
    "solve_pairing",
    "optimize_basis",
    "direct_sum_basis",
]


class BasisError(CodeError):
    pass


@dataclass(frozen=True)
class JointIntermediates:
    hxx: DeformedCode
    hzz: DeformedCode
    s_xx: int
    s_zz: int


@dataclass(frozen=True)
class PairingSolution:
    j_x1: BitVector
    j_x2: BitVector
    A: BitMatrix
    q: BitVector
    j_z3: BitVector
    j_z4: BitVector


def build_joint_intermediates(code: CssCode, s_xx: int, s_zz: int) -> JointIntermediates:
    if s_xx < 1 or s_zz < 1:
        raise BasisError("separations must be >= 1")
    hxx = joint_connect(code, code, "horizontal", s_xx)
    hzz = joint_connect(code, code, "vertical", s_zz)
    for d in (hxx, hzz):
        three_block_form(d)
    return JointIntermediates(hxx, hzz, s_xx, s_zz)


def three_block_form(d: DeformedCode) -> tuple[BitMatrix, BitMatrix]:
    """Reorder columns to (left block, ancilla, right block) and rows to
    (left checks, new checks, right checks); checks the zero blocks."""
    n = d.base.n // 2
    na = d.ancilla_size
    cols = list(range(n)) + list(range(2 * n, 2 * n + na)) + list(range(n, 2 * n))
    mats = []
    for h, base_h in ((d.hbar_x, d.base.h_x), (d.hbar_z, d.base.h_z)):
        r = base_h.rows // 2
        rows = list(range(r)) + list(range(2 * r, h.rows)) + list(range(r, 2 * r))
        mats.append(h.select_rows(rows).select_columns(cols))
    meas, other = (mats[0], mats[1]) if d.kind == "X" else (mats[1], mats[0])
    bm, bo = (d.base.h_x, d.base.h_z) if d.kind == "X" else (d.base.h_z, d.base.h_x)
    rm, ro = bm.rows // 2, bo.rows // 2
    L, A, R = range(n), range(n, n + na), range(n + na, 2 * n + na)

    def zero(m, rows, cs):
        return m.select_rows(rows).select_columns(cs).is_zero()

    ok = (
        zero(meas, range(rm), list(A) + list(R))
        and zero(meas, range(meas.rows - rm, meas.rows), list(L) + list(A))
        and zero(other, range(ro), R)
        and zero(other, range(ro, other.rows - ro), list(L) + list(R))
        and zero(other, range(other.rows - ro, other.rows), L)
    )
    if not ok:
        raise BasisError("joint intermediate violates the three-block zero pattern")
    return mats[0], mats[1]


def joint_channel_space(d: DeformedCode, side: str) -> list[tuple[int, int]]:
    """Basis of pairs ``(a, b)`` with ``(a, 0, b)`` in the row space of
    ``hbar_x`` (``side="X"``) or ``hbar_z`` (``side="Z"``)."""
    h = d.hbar_x if side == "X" else d.hbar_z
    n2 = d.base.n
    n = n2 // 2
    anc = h.select_columns(list(d.ancilla_range))
    left = kernel_basis(anc.T)  # x with x·h restricted to ancilla = 0
    full = (1 << n) - 1
    red = _Reducer()
    out = []
    for x in left:
        v = h.vec_mul(x).bits & ((1 << n2) - 1)
        if red.add(v):
            out.append((v & full, v >> n))
    return out


def _classes(v: int, dual_rows) -> int:
    c = 0
    for i, r in enumerate(dual_rows):
        c |= ((v & r).bit_count() & 1) << i
    return c


def _image_span(items, image):
    """Enumerate the distinct nonzero images of span(items).

    ``items`` are ints, ``image`` maps an int linearly to a small int. Yields
    ``(img, representative)`` once per image value.
    """
    basis = []  # (img, rep) with distinct leading bits of img
    for v in items:
        img = image(v)
        for bi, bv in basis:
            if img ^ bi < img:
                img ^= bi
                v ^= bv
        if img:
            basis.append((img, v))
            basis.sort(reverse=True)
    for mask in range(1, 1 << len(basis)):
        img = rep = 0
        for i, (bi, bv) in enumerate(basis):
            if mask >> i & 1:
                img ^= bi
                rep ^= bv
        yield img, rep


def joint_x_pairs(ji: JointIntermediates, code: CssCode, budget: int = 1 << 16) -> list[tuple[BitVector, BitVector]]:
    """Admissible ``(j_x1, j_x2)`` in increasing total weight."""
    ref = canonical_logicals(code)
    jz = ref.j_z.int_rows
    hx = code.h_x.int_rows
    gens = joint_channel_space(ji.hxx, "X")
    n, k = code.n, ref.k
    full = (1 << n) - 1
    packed = [a | (b << n) for a, b in gens]
    seen = {}
    for i, (img, v) in enumerate(_image_span(packed, lambda v: _classes(v & full, jz) | (_classes(v >> n, jz) << k))):
        if i >= budget:
            break
        ca, cb = img & ((1 << k) - 1), img >> k
        if not ca or not cb or ca == cb:
            continue
        a2, b2 = reduce_weight(v & full, hx), reduce_weight(v >> n, hx)
        seen[img] = (a2.bit_count() + b2.bit_count(), i, a2, b2)
    ranked = sorted(seen.values())
    return [(BitVector(code.n, a), BitVector(code.n, b)) for _, _, a, b in ranked]


def find_joint_x_pair(ji: JointIntermediates, code: CssCode, budget: int = 1 << 16):
    pairs = joint_x_pairs(ji, code, budget)
    return pairs[0] if pairs else None


def solve_pairing(ji: JointIntermediates, pair, code: CssCode, budget: int = 1 << 16) -> PairingSolution:
    j1, j2 = pair
    n = code.n
    ref = canonical_logicals(code)
    jx = ref.j_x.int_rows
    hz = code.h_z.int_rows
    gens = joint_channel_space(ji.hzz, "Z")
    if not gens:
        raise BasisError("no vertical joint channels; try different separations")
    A = BitMatrix([a | (b << n) for a, b in gens], 2 * n)
    AL = [a for a, _ in gens]
    AR = [b for _, b in gens]
    m = len(gens)
    # constraint columns: q·A_L·j1, q·A_L·j2, q·A_R·j1, q·A_R·j2
    cons = BitMatrix(
        [sum((((v & j.bits).bit_count() & 1) << l) for l, v in enumerate(side)) for side in (AL, AR) for j in (j1, j2)],
        m,
    )
    Q = kernel_basis(cons).int_rows
    k = ref.k

    def combine(q):
        zl = zr = 0
        for l in range(m):
            if q >> l & 1:
                zl ^= AL[l]
                zr ^= AR[l]
        return zl, zr

    def image(q):
        zl, zr = combine(q)
        return _classes(zl, jx) | (_classes(zr, jx) << k)

    best = None
    for count, (img, q) in enumerate(_image_span(Q, image)):
        if count >= budget:
            break
        cl, cr = img & ((1 << k) - 1), img >> k
        if not cl or not cr or cl == cr:
            continue
        zl, zr = combine(q)
        zl2, zr2 = reduce_weight(zl, hz), reduce_weight(zr, hz)
        key = (zl2.bit_count() + zr2.bit_count(), count)
        if best is None or key < best[0]:
            best = (key, q, zl2, zr2)
    if best is None:
        raise BasisError("no admissible q: try a different (j_x1, 0, j_x2) or other separations")
    _, q, zl, zr = best
    return PairingSolution(j1, j2, A, BitVector(m, q), BitVector(n, zl), BitVector(n, zr))


def _complete(code: CssCode, sol: PairingSolution) -> LogicalBasis:
    """Extend X0, X1 and Z2, Z3 to a paired basis, lightest candidates first."""
    ref = canonical_logicals(code)
    k, n = ref.k, code.n
    if k < 4:
        raise BasisError("basis optimization needs k >= 4")
    hx, hz = code.h_x.int_rows, code.h_z.int_rows
    x0, x1 = _classes(sol.j_x1.bits, ref.j_z.int_rows), _classes(sol.j_x2.bits, ref.j_z.int_rows)
    z2, z3 = _classes(sol.j_z3.bits, ref.j_x.int_rows), _classes(sol.j_z4.bits, ref.j_x.int_rows)

    def phys(c, rows, stab):
        v = 0
        for i in range(k):
            if c >> i & 1:
                v ^= rows[i]
        return reduce_weight(v, stab)

    def dot(a, b):
        return (a & b).bit_count() & 1

    cands = sorted(range(1, 1 << k), key=lambda c: (phys(c, ref.j_x.int_rows, hx).bit_count(), c))
    X = [x0, x1]
    for want in ((1, 0), (0, 1)):
        X.append(next(c for c in cands if (dot(c, z2), dot(c, z3)) == want))
    red = _Reducer([x0, x1])
    for c in cands:
        if len(X) == k:
            break
        if dot(c, z2) == 0 and dot(c, z3) == 0 and red.add(c):
            X.append(c)
    Xm = BitMatrix(X, k)
    red_, piv, inv = rref(Xm)
    if len(piv) != k:
        raise BasisError("basis completion failed")
    Z = inv.T.int_rows  # dual basis: X · Zᵀ = I
    jx = [sol.j_x1.bits, sol.j_x2.bits] + [phys(c, ref.j_x.int_rows, hx) for c in X[2:]]
    jz = [phys(c, ref.j_z.int_rows, hz) for c in Z]
    jz[2], jz[3] = sol.j_z3.bits, sol.j_z4.bits
    return LogicalBasis(BitMatrix(jx, n), BitMatrix(jz, n))


def optimize_basis(code: CssCode, s_xx: int, s_zz: int, budget: int = 1 << 16) -> LogicalBasis:
    """Paired basis with ``X0 ⊗ X1`` and ``Z2 ⊗ Z3`` jointly measurable."""
    ji = build_joint_intermediates(code, s_xx, s_zz)
    pairs = joint_x_pairs(ji, code, budget)
    if not pairs:
        raise BasisError(f"no joint X channel at s_xx={s_xx}")
    last = None
    for pair in pairs:
        try:
            sol = solve_pairing(ji, pair, code, budget)
        except BasisError as exc:
            last = exc
            continue
        basis = _complete(code, sol)
        check_basis(code, basis)
        return basis
    raise BasisError(f"no pair admits a vertical partner: {last}")
