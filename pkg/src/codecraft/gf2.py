"""Bit-packed GF(2) vectors and matrices.

Rows are stored as Python integers: bit ``j`` of a row is column ``j``.
XOR of two rows is a single word-parallel operation and weights are a
population count, which is all the linear algebra here needs.

Pivot selection is always lowest-column-first so every derived basis is
reproducible across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "popcount",
    "parity",
    "rank",
    "rref",
    "kernel_basis",
    "solve_left",
    "in_rowspace",
]


def popcount(x: int) -> int:
    return x.bit_count()


def parity(x: int) -> int:
    return x.bit_count() & 1


def _mask(n: int) -> int:
    return (1 << n) - 1


def _support_to_int(support: Iterable[int]) -> int:
    x = 0
    for j in support:
        x |= 1 << j
    return x


def _int_support(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


@dataclass(frozen=True)
class BitVector:
    """A length-``len`` vector over GF(2), packed into ``bits``."""

    len: int
    bits: int = 0

    def __post_init__(self):
        if self.len < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.len:
            raise ValueError(f"bits exceed length {self.len}")

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(n, 0)

    @classmethod
    def from_support(cls, n: int, support: Iterable[int]) -> "BitVector":
        return cls(n, _support_to_int(support))

    @classmethod
    def from_array(cls, arr) -> "BitVector":
        arr = np.asarray(arr).astype(np.uint8) & 1
        return cls(len(arr), _support_to_int(np.flatnonzero(arr).tolist()))

    @classmethod
    def from_string(cls, s: str) -> "BitVector":
        """Parse ``"0110"`` with the leftmost character as coordinate 0."""
        return cls(len(s), _support_to_int(i for i, ch in enumerate(s) if ch == "1"))

    def weight(self) -> int:
        return popcount(self.bits)

    def support(self) -> list[int]:
        return _int_support(self.bits)

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.len, dtype=np.uint8)
        arr[self.support()] = 1
        return arr

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.len:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __add__(self, other: "BitVector") -> "BitVector":
        _check_len(self.len, other.len)
        return BitVector(self.len, self.bits ^ other.bits)

    __xor__ = __add__

    def dot(self, other: "BitVector") -> int:
        _check_len(self.len, other.len)
        return parity(self.bits & other.bits)

    def concat(self, other: "BitVector") -> "BitVector":
        return BitVector(self.len + other.len, self.bits | (other.bits << self.len))

    def select(self, cols: Sequence[int]) -> "BitVector":
        """Restrict to ``cols`` (in the given order)."""
        return BitVector(len(cols), _support_to_int(i for i, c in enumerate(cols) if self.bits >> c & 1))

    def __str__(self) -> str:
        return "".join("1" if self.bits >> j & 1 else "0" for j in range(self.len))

    def __bool__(self) -> bool:
        return self.bits != 0


def _check_len(a: int, b: int):
    if a != b:
        raise ValueError(f"dimension mismatch: {a} != {b}")


class BitMatrix:
    """Immutable dense GF(2) matrix with packed rows."""

    __slots__ = ("_rows", "cols")

    def __init__(self, rows: Iterable[int], cols: int):
        rows = tuple(int(r) for r in rows)
        lim = _mask(cols)
        for r in rows:
            if r < 0 or r & ~lim:
                raise ValueError(f"row exceeds {cols} columns")
        self._rows = rows
        self.cols = cols

    # construction -------------------------------------------------------
    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls([0] * rows, cols)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls([1 << i for i in range(n)], n)

    @classmethod
    def from_vectors(cls, vecs: Sequence[BitVector], cols: int | None = None) -> "BitMatrix":
        if cols is None:
            if not vecs:
                raise ValueError("cannot infer column count from no vectors")
            cols = vecs[0].len
        for v in vecs:
            _check_len(v.len, cols)
        return cls([v.bits for v in vecs], cols)

    @classmethod
    def from_supports(cls, supports: Iterable[Iterable[int]], cols: int) -> "BitMatrix":
        return cls([_support_to_int(s) for s in supports], cols)

    @classmethod
    def from_array(cls, arr) -> "BitMatrix":
        arr = np.atleast_2d(np.asarray(arr)).astype(np.uint8) & 1
        return cls([_support_to_int(np.flatnonzero(row).tolist()) for row in arr], arr.shape[1])

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> "BitMatrix":
        vecs = [BitVector.from_string(s) for s in rows]
        return cls.from_vectors(vecs, len(rows[0]) if rows else 0)

    @classmethod
    def vstack(cls, *mats: "BitMatrix") -> "BitMatrix":
        cols = mats[0].cols
        rows: list[int] = []
        for m in mats:
            _check_len(m.cols, cols)
            rows.extend(m._rows)
        return cls(rows, cols)

    @classmethod
    def hstack(cls, *mats: "BitMatrix") -> "BitMatrix":
        nrows = mats[0].rows
        out = [0] * nrows
        shift = 0
        for m in mats:
            _check_len(m.rows, nrows)
            for i, r in enumerate(m._rows):
                out[i] |= r << shift
            shift += m.cols
        return cls(out, shift)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["BitMatrix"]]) -> "BitMatrix":
        return cls.vstack(*[cls.hstack(*row) for row in blocks])

    # accessors -----------------------------------------------------------
    @property
    def rows(self) -> int:
        return len(self._rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self.cols)

    @property
    def int_rows(self) -> tuple[int, ...]:
        return self._rows

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self._rows[i])

    def __iter__(self) -> Iterator[BitVector]:
        return (BitVector(self.cols, r) for r in self._rows)

    def __len__(self) -> int:
        return len(self._rows)

    def __getitem__(self, ij):
        i, j = ij
        return (self._rows[i] >> j) & 1

    def __eq__(self, other) -> bool:
        return isinstance(other, BitMatrix) and self.cols == other.cols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.cols, self._rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"

    def __str__(self) -> str:
        return "\n".join(str(v) for v in self)

    def to_array(self) -> np.ndarray:
        arr = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            arr[i, _int_support(r)] = 1
        return arr

    def supports(self) -> list[list[int]]:
        return [_int_support(r) for r in self._rows]

    def row_weights(self) -> list[int]:
        return [popcount(r) for r in self._rows]

    def column_mask(self) -> int:
        """Bitmask of columns that are nonzero in at least one row."""
        m = 0
        for r in self._rows:
            m |= r
        return m

    def is_zero(self) -> bool:
        return not any(self._rows)

    # algebra ------------------------------------------------------------
    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self._rows):
            for j in _int_support(r):
                out[j] |= 1 << i
        return BitMatrix(out, self.rows)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return BitMatrix([a ^ b for a, b in zip(self._rows, other._rows)], self.cols)

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        _check_len(self.cols, other.rows)
        orows = other._rows
        out = []
        for r in self._rows:
            acc = 0
            for j in _int_support(r):
                acc ^= orows[j]
            out.append(acc)
        return BitMatrix(out, other.cols)

    def mul_vec(self, v: BitVector) -> BitVector:
        """``M · vᵀ`` as a vector indexed by rows."""
        _check_len(self.cols, v.len)
        return BitVector(self.rows, _support_to_int(i for i, r in enumerate(self._rows) if parity(r & v.bits)))

    def vec_mul(self, x: BitVector) -> BitVector:
        """``x · M`` as a vector indexed by columns."""
        _check_len(self.rows, x.len)
        acc = 0
        for i in _int_support(x.bits):
            acc ^= self._rows[i]
        return BitVector(self.cols, acc)

    def select_columns(self, cols: Sequence[int]) -> "BitMatrix":
        out = []
        for r in self._rows:
            out.append(_support_to_int(i for i, c in enumerate(cols) if r >> c & 1))
        return BitMatrix(out, len(cols))

    def select_rows(self, idx: Sequence[int]) -> "BitMatrix":
        return BitMatrix([self._rows[i] for i in idx], self.cols)

    def drop_zero_rows(self) -> "BitMatrix":
        return BitMatrix([r for r in self._rows if r], self.cols)

    def append_rows(self, rows: Iterable[int]) -> "BitMatrix":
        return BitMatrix(self._rows + tuple(rows), self.cols)


# ---------------------------------------------------------------------------
# elimination kernels on raw int rows


def _eliminate(rows: list[int], ncols: int, track: bool = False):
    """In-place Gauss-Jordan elimination on ``rows``.

    Returns ``(pivot_cols, transform_rows)``; pivots are taken lowest column
    first and pivot rows are moved to the top in pivot order.
    """
    m = len(rows)
    trans = [1 << i for i in range(m)] if track else None
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == m:
            break
        bit = 1 << c
        p = next((i for i in range(r, m) if rows[i] & bit), None)
        if p is None:
            continue
        if p != r:
            rows[r], rows[p] = rows[p], rows[r]
            if track:
                trans[r], trans[p] = trans[p], trans[r]
        pr = rows[r]
        for i in range(m):
            if i != r and rows[i] & bit:
                rows[i] ^= pr
                if track:
                    trans[i] ^= trans[r]
        pivots.append(c)
        r += 1
    return pivots, trans


def _rank_ints(rows: Iterable[int]) -> int:
    # Leading-bit basis; no column bound needed.
    basis: dict[int, int] = {}
    for r in rows:
        while r:
            h = r.bit_length() - 1
            b = basis.get(h)
            if b is None:
                basis[h] = r
                break
            r ^= b
    return len(basis)


class _Reducer:
    """Incremental echelon basis for fast membership and decomposition."""

    def __init__(self, rows: Iterable[int] = (), track: bool = False):
        self.basis: dict[int, int] = {}  # leading bit -> row
        self.combo: dict[int, int] = {}  # leading bit -> combination of inputs
        self.track = track
        self.count = 0
        for r in rows:
            self.add(r)

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            h = v.bit_length() - 1
            b = self.basis.get(h)
            if b is None:
                break
            v ^= b
            if self.track:
                combo ^= self.combo[h]
        return v, combo

    def add(self, v: int) -> bool:
        idx = self.count
        self.count += 1
        res, combo = self.reduce(v)
        if not res:
            return False
        h = res.bit_length() - 1
        self.basis[h] = res
        if self.track:
            self.combo[h] = combo ^ (1 << idx)
        return True

    def contains(self, v: int) -> bool:
        # Full reduction is needed: the leftover after stopping must be zero.
        while v:
            h = v.bit_length() - 1
            b = self.basis.get(h)
            if b is None:
                return False
            v ^= b
        return True

    @property
    def rank(self) -> int:
        return len(self.basis)


# ---------------------------------------------------------------------------
# public operations


def rank(M: BitMatrix) -> int:
    """Dimension of the row space of ``M`` over GF(2)."""
    return _rank_ints(M.int_rows)


def rref(M: BitMatrix) -> tuple[BitMatrix, list[int], BitMatrix]:
    """Reduced row-echelon form.

    Returns ``(reduced, pivot_cols, transform)`` with
    ``transform @ M == reduced`` and ``transform`` invertible.
    """
    rows = list(M.int_rows)
    pivots, trans = _eliminate(rows, M.cols, track=True)
    return BitMatrix(rows, M.cols), pivots, BitMatrix(trans, M.rows)


def kernel_basis(M: BitMatrix) -> BitMatrix:
    """Basis of ``{v : M vᵀ = 0}``, one basis vector per free column."""
    rows = list(M.int_rows)
    pivots, _ = _eliminate(rows, M.cols)
    pivot_set = set(pivots)
    out = []
    for f in range(M.cols):
        if f in pivot_set:
            continue
        v = 1 << f
        for i, c in enumerate(pivots):
            if rows[i] >> f & 1:
                v |= 1 << c
        out.append(v)
    return BitMatrix(out, M.cols)


def solve_left(M: BitMatrix, b: BitVector) -> BitVector | None:
    """Return some ``x`` with ``x · M = b``, or ``None`` if ``b`` is not in the row space.

    The solution is the one read off the reduced row-echelon form, so it is
    deterministic for a given ``M``.
    """
    _check_len(b.len, M.cols)
    rows = list(M.int_rows)
    pivots, trans = _eliminate(rows, M.cols, track=True)
    v = b.bits
    x = 0
    for i, c in enumerate(pivots):
        if v >> c & 1:
            v ^= rows[i]
            x ^= trans[i]
    if v:
        return None
    return BitVector(M.rows, x)


def in_rowspace(M: BitMatrix, v: BitVector) -> bool:
    _check_len(v.len, M.cols)
    return _Reducer(M.int_rows).contains(v.bits)
