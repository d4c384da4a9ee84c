"""Logical operator painting: choose storages of the kept Z logicals so that
the deformed code, read as a subsystem code, keeps a target distance.

A storage ``u_a`` is a vector in ker(H̃_X) that pairs with the kept X
logical ``a`` and with no other. Painting adds gauge vectors ``v`` (kernel
vectors that pair with no kept X logical) to ``u_a`` until no X error
lighter than ``d_th`` flips it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .bb import CodeError, CssCode, LogicalBasis, reduce_weight
from .craft import DeformedCode
from .distance import auto_limit, exhaustive_min_weight, isd_min_weight
from .gf2 import BitMatrix, BitVector, _Reducer, kernel_basis, rref, solve_left

__all__ = [
    "PaintFailure",
    "PaintConfig",
    "StorageSet",
    "Storage",
    "PauliFrame",
    "constrained_kernel_basis",
    "min_weight_constrained",
    "paint",
    "extract_storage",
    "storages_for",
    "feedback_correction",
    "check_storages",
]


class PaintFailure(CodeError):
    """No gauge vector is left that removes the current light error."""

    def __init__(self, msg: str, index: int, error: BitVector):
        super().__init__(msg)
        self.index = index
        self.error = error


@dataclass(frozen=True)
class PaintConfig:
    d_th: int
    limit: int | None = None
    budget: int = 2000
    seed: int = 0

    def __post_init__(self):
        if self.d_th < 1:
            raise CodeError("d_th must be >= 1")


@dataclass(frozen=True)
class Storage:
    j_z: BitVector
    h_z: BitVector
    beta: BitVector


@dataclass(frozen=True)
class StorageSet:
    """Storages ``u`` of the kept Z logicals plus the gauge pool ``v``.

    ``h_rows`` is an independent basis of the deformed Z check row space;
    ``unmeasured`` holds the kept X logicals over base columns.
    """

    u: tuple
    v: tuple
    h_rows: BitMatrix
    unmeasured: BitMatrix
    iterations: int = 0
    history: tuple = field(default=(), compare=False)

    def u_matrix(self) -> BitMatrix:
        n = self.h_rows.cols
        return BitMatrix.from_vectors(list(self.u), n)

    def pairing(self, deformed: DeformedCode) -> BitMatrix:
        zero = BitVector.zeros(deformed.ancilla_size)
        jx = BitMatrix.from_vectors([v.concat(zero) for v in self.unmeasured], deformed.n)
        return jx @ self.u_matrix().T


@dataclass(frozen=True)
class PauliFrame:
    """Pending logical corrections.

    ``flips[a] = 1`` means the sign of kept Z logical ``a`` must be flipped,
    i.e. the partner X logical is applied in software.
    """

    flips: BitVector

    def is_identity(self) -> bool:
        return self.flips.bits == 0


def check_storages(deformed: DeformedCode, s: StorageSet) -> None:
    d = deformed.as_x_type()
    if d.unmeasured is None:
        raise CodeError("deformed code has no kept logicals recorded; build it with x_cut")
    if s.unmeasured != d.unmeasured:
        raise CodeError("storages were built for different kept logicals")
    for i, u in enumerate(s.u):
        if u.len != d.n:
            raise CodeError(f"storage {i} has length {u.len}, expected {d.n}")
        if d.hbar_x.mul_vec(u).bits:
            raise CodeError(f"storage {i} does not commute with the deformed X checks")
    if s.pairing(d) != BitMatrix.identity(len(s.u)):
        raise CodeError("storages do not pair one-to-one with the kept X logicals")


def _pairing_value(jx_ext: list[int], v: int) -> int:
    p = 0
    for a, j in enumerate(jx_ext):
        p |= ((j & v).bit_count() & 1) << a
    return p


def constrained_kernel_basis(deformed: DeformedCode, unmeasured: BitMatrix | None = None) -> StorageSet:
    """Split ker(H̃_X) into storages ``u``, gauge vectors ``v`` and Z checks.

    Storages are taken without ancilla support whenever the kernel allows
    it, i.e. the original Z logicals times base stabilizers, and are then
    shortened greedily with ancilla-free gauge vectors and checks.
    """
    d = deformed.as_x_type()
    unmeasured = d.unmeasured if unmeasured is None else unmeasured
    if unmeasured is None:
        raise CodeError("kept logicals are required")
    n, nb = d.n, d.n_base
    k1 = unmeasured.rows
    jx = list(unmeasured.int_rows)  # zero on ancilla, same ints
    base_mask = (1 << nb) - 1
    # Echelon form with ancilla bits most significant, then pairing bits,
    # then base bits: ancilla-free vectors end up with low leading bits.
    red = _Reducer()
    for r in kernel_basis(d.hbar_x).int_rows:
        red.add(((r >> nb) << (nb + k1)) | (_pairing_value(jx, r) << nb) | (r & base_mask))
    ech = [red.basis[h] for h in sorted(red.basis)]

    def unpack(x):
        return (x & base_mask) | ((x >> (nb + k1)) << nb), (x >> nb) & ((1 << k1) - 1)

    p_red = _Reducer(track=True)
    paired, pool = [], []
    for x in ech:
        vec, p = unpack(x)
        res, combo = p_red.reduce(p)
        for i in range(len(paired)):
            if combo >> i & 1:
                vec ^= paired[i][0]
        if res:
            p_red.add(p)
            paired.append((unpack(x)[0], p))
        else:
            pool.append(vec)
    if len(paired) != k1:
        raise CodeError(f"infeasible pairing: kernel reaches only {len(paired)} of {k1} kept logicals")
    h_red = _Reducer()
    h_rows = [r for r in d.hbar_z.int_rows if h_red.add(r)]
    v = [x for x in pool if h_red.add(x)]
    v = _sparsify(v, h_rows)
    pm = BitMatrix([p for _, p in paired], k1)
    pinv = _inverse(pm)
    u = (pinv @ BitMatrix([x for x, _ in paired], n)).int_rows
    shorten = [x for x in v + h_rows if not x >> nb]
    u = [reduce_weight(x, shorten) if not x >> nb else x for x in u]
    s = StorageSet(
        tuple(BitVector(n, x) for x in u),
        tuple(BitVector(n, x) for x in v),
        BitMatrix(h_rows, n),
        unmeasured,
    )
    check_storages(d, s)
    return s


def _sparsify(v: list[int], h_rows: list[int]) -> list[int]:
    """Greedy weight reduction of each gauge vector against checks and the others."""
    out = list(v)
    for i in range(len(out)):
        others = h_rows + out[:i] + out[i + 1:]
        out[i] = reduce_weight(out[i], others)
    return out


def _inverse(m: BitMatrix) -> BitMatrix:
    red, piv, trans = rref(m)
    if len(piv) != m.rows:
        raise CodeError("infeasible pairing: pairing matrix is singular")
    return trans


def min_weight_constrained(h: BitMatrix, u: BitVector, limit: int, budget: int = 0,
                           seed: int = 0) -> BitVector | None:
    """Lightest ``e`` with ``h·e = 0`` and ``u·e = 1`` among weights ``<= limit``.

    Exhaustive while the half tables fit in memory; past that, randomized
    trials with ``budget`` rounds (not a proof of absence).
    """
    t = BitMatrix([u.bits], u.len)
    if _Reducer(h.int_rows).contains(u.bits):
        return None
    exact_lim = min(limit, auto_limit(h.cols))
    r = exhaustive_min_weight(h, t, exact_lim, seed)
    if r is not None:
        return r.vector
    if limit > exact_lim and budget > 0:
        r = isd_min_weight(h, t, budget, seed, stop_at=exact_lim + 1)
        if r is not None and r.weight <= limit:
            return r.vector
    return None


def paint(deformed: DeformedCode, init: StorageSet, cfg: PaintConfig, callback=None) -> StorageSet:
    """Raise every storage's minimum flipping weight to at least ``cfg.d_th``.

    ``callback(a, storages)`` is invoked after every update.
    """
    d = deformed.as_x_type()
    check_storages(d, init)
    u = list(init.u)
    history = []
    iterations = 0
    if cfg.d_th <= 1:
        return init
    h = d.hbar_z
    for a in range(len(u)):
        work = [x.bits for x in init.v]
        e = min_weight_constrained(h, u[a], cfg.d_th - 1, cfg.budget, cfg.seed)
        while e is not None:
            history.append((a, e.weight()))
            eb = e.bits
            # lightest candidate first, index breaks ties
            cand = [(w.bit_count(), i) for i, w in enumerate(work) if (w & eb).bit_count() & 1]
            pick = min(cand)[1] if cand else None
            if pick is None:
                raise PaintFailure(
                    f"painting failed on storage {a}: no gauge vector removes an error of weight {e.weight()}",
                    a, e)
            w = work.pop(pick)
            work = [x ^ w if (x & eb).bit_count() & 1 else x for x in work]
            u[a] = BitVector(u[a].len, u[a].bits ^ w)
            iterations += 1
            if callback is not None:
                callback(a, StorageSet(tuple(u), init.v, init.h_rows, init.unmeasured, iterations))
            e = min_weight_constrained(h, u[a], cfg.d_th - 1, cfg.budget, cfg.seed)
    out = StorageSet(tuple(u), init.v, init.h_rows, init.unmeasured, iterations, tuple(history))
    check_storages(d, out)
    return out


def extract_storage(u: BitVector, base: CssCode, basis: LogicalBasis) -> tuple[BitVector, BitVector, BitVector]:
    """Split ``u`` into ``(j'_z, h_z, beta)`` with ``u = (j'_z + h_z, beta)``."""
    nb = base.n
    ub = u.select(range(nb))
    beta = u.select(range(nb, u.len))
    m = BitMatrix.vstack(basis.j_z, base.h_z)
    x = solve_left(m, ub)
    if x is None:
        raise CodeError("storage base part is not a Z logical times Z stabilizers")
    k = basis.k
    jz = BitVector.zeros(nb)
    for a in range(k):
        if x[a]:
            jz = jz + basis.j_z.row(a)
    hz = ub + jz
    return jz, hz, beta


def storages_for(deformed: DeformedCode, s: StorageSet, basis: LogicalBasis) -> list[Storage]:
    """Decompose every storage; ``basis`` is the base code's basis as given."""
    d = deformed.as_x_type()
    b = basis if deformed.kind == "X" else basis.dual()
    out = []
    for u in s.u:
        jz, hz, beta = extract_storage(u, d.base, b)
        out.append(Storage(jz, hz, beta))
    return out


def feedback_correction(storages, ancilla_outcomes: BitVector) -> PauliFrame:
    """Frame from ancilla Z-basis readout: logical ``a`` flips iff the
    outcomes have odd parity on supp(beta_a)."""
    flips = 0
    for a, st in enumerate(storages):
        beta = st.beta if isinstance(st, Storage) else st
        if beta.len != ancilla_outcomes.len:
            raise CodeError("outcome vector length does not match the ancilla system")
        flips |= beta.dot(ancilla_outcomes) << a
    return PauliFrame(BitVector(len(storages), flips))
