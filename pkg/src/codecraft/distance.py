"""Minimum-weight logical errors: exact meet-in-the-middle search,
randomized information-set sampling, and a brute-force oracle.

Every search here answers the same question: find the lightest ``e`` with
``h · e = 0`` that anticommutes with at least one row of ``targets``.
For a plain CSS code ``h`` is one check matrix and ``targets`` the logical
operators of the other type; for a deformed code they are the deformed
checks and the stored logicals.
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bb import CodeError, CssCode, LogicalBasis, canonical_logicals, logical_count
from .gf2 import BitMatrix, BitVector, _Reducer, kernel_basis

__all__ = [
    "DistanceReport",
    "SearchResult",
    "min_weight_logical",
    "exhaustive_min_weight",
    "isd_min_weight",
    "oracle_min_weight",
    "css_distance",
    "dressed_distance",
    "oracle_distance",
    "auto_limit",
]

TABLE_CAP = 2_000_000
ORACLE_CAP = 24
_CHUNK = 128


@dataclass(frozen=True)
class SearchResult:
    weight: int
    vector: BitVector
    exact: bool
    lower_bound: int
    trials: int = 0


@dataclass(frozen=True)
class DistanceReport:
    """``value`` is the smallest weight found over the reported sides.

    ``exact`` means every lighter weight was ruled out by exhaustive search.
    """

    value: int
    exact: bool
    side: str
    trials: int = 0
    seed: int | None = None
    witness: BitVector | None = None
    lower_bound: int = 0
    sides: dict = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict:
        d = {"value": self.value, "exact": self.exact, "side": self.side, "trials": self.trials,
             "seed": self.seed, "lower_bound": self.lower_bound}
        if self.sides:
            d["sides"] = {k: v.to_dict() for k, v in self.sides.items()}
        if self.witness is not None:
            d["witness"] = self.witness.support()
        return d


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("CODECRAFT_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# exhaustive


def auto_limit(n: int, cap: int = TABLE_CAP) -> int:
    """Largest weight whose half-size subset table stays under ``cap`` entries."""
    w = 0
    while w < n and math.comb(n, (w + 2) // 2) <= cap:
        w += 1
    return w


def _column_data(h: BitMatrix, targets: BitMatrix, rng: np.random.Generator):
    """Per-column 64-bit hash of the ``h`` syndrome and exact target parities."""
    n = h.cols
    harr = h.to_array().astype(bool)
    tarr = targets.to_array().astype(bool)
    keys = rng.integers(0, 2**63, size=h.rows, dtype=np.uint64) * np.uint64(2) + np.uint64(1)
    hh = np.zeros(n, dtype=np.uint64)
    for i in range(h.rows):
        hh[harr[i]] ^= keys[i]
    if targets.rows > 64:
        raise CodeError("at most 64 target rows are supported")
    tp = np.zeros(n, dtype=np.uint64)
    for i in range(targets.rows):
        tp[tarr[i]] |= np.uint64(1 << i)
    return hh, tp


def _combos(n: int, r: int) -> np.ndarray:
    if r == 0:
        return np.zeros((1, 0), dtype=np.int32)
    count = math.comb(n, r)
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(n), r)),
                       dtype=np.int32, count=count * r)
    return flat.reshape(count, r)


class _Tables:
    def __init__(self, hh, tp):
        self.hh, self.tp = hh, tp
        self.n = len(hh)
        self.cache = {}

    def get(self, r):
        if r not in self.cache:
            c = _combos(self.n, r)
            h = np.zeros(len(c), dtype=np.uint64)
            t = np.zeros(len(c), dtype=np.uint64)
            for j in range(r):
                h ^= self.hh[c[:, j]]
                t ^= self.tp[c[:, j]]
            order = np.argsort(h, kind="stable")
            self.cache[r] = (c[order], h[order], t[order])
        return self.cache[r]


def _verify(support, hrows, trows) -> bool:
    v = 0
    for j in support:
        v |= 1 << j
    return all(not (v & r).bit_count() & 1 for r in hrows) and any((v & t).bit_count() & 1 for t in trows)


def exhaustive_min_weight(h: BitMatrix, targets: BitMatrix, limit: int, seed: int = 0) -> SearchResult | None:
    """Exact search over weights ``1..limit``; ``None`` if nothing that light exists.

    Weight ``w`` is split as ``ceil(w/2) + floor(w/2)`` and the two halves are
    joined on a random linear hash of their syndromes. Ties go to the
    lexicographically smallest support.
    """
    n = h.cols
    rng = np.random.default_rng(seed)
    hh, tp = _column_data(h, targets, rng)
    tabs = _Tables(hh, tp)
    hrows, trows = h.int_rows, targets.int_rows
    for w in range(1, min(limit, n) + 1):
        w1, w2 = (w + 1) // 2, w // 2
        c1, h1, t1 = tabs.get(w1)
        c2, h2, t2 = tabs.get(w2)
        lo = np.searchsorted(h2, h1, side="left")
        hi = np.searchsorted(h2, h1, side="right")
        cnt = hi - lo
        hit = np.nonzero(cnt)[0]
        if len(hit) == 0:
            continue
        i1 = np.repeat(hit, cnt[hit])
        starts = np.repeat(lo[hit], cnt[hit])
        offs = np.arange(len(i1)) - np.repeat(np.cumsum(cnt[hit]) - cnt[hit], cnt[hit])
        i2 = starts + offs
        keep = (t1[i1] ^ t2[i2]) != 0
        i1, i2 = i1[keep], i2[keep]
        best = None
        for a, b in zip(i1.tolist(), i2.tolist()):
            s = set(c1[a].tolist()) ^ set(c2[b].tolist())
            if len(s) != w:
                continue
            sup = tuple(sorted(s))
            if best is not None and sup >= best:
                continue
            if _verify(sup, hrows, trows):
                best = sup
        if best is not None:
            return SearchResult(w, BitVector.from_support(n, best), True, w)
    return None


# ---------------------------------------------------------------------------
# randomized information-set search


def _pack(m: BitMatrix) -> np.ndarray:
    words = max(1, (m.cols + 63) // 64)
    out = np.zeros((m.rows, words), dtype=np.uint64)
    for i, r in enumerate(m.int_rows):
        for w in range(words):
            out[i, w] = (r >> (64 * w)) & 0xFFFFFFFFFFFFFFFF
    return out


def _unpack(row: np.ndarray, n: int) -> BitVector:
    v = 0
    for w in range(len(row) - 1, -1, -1):
        v = (v << 64) | int(row[w])
    return BitVector(n, v)


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1)


def _isd_chunk(K, T, n, seed, chunk, trials, best_w):
    """Run ``trials`` rounds seeded by ``(seed, chunk)``; return (weight, row, used)."""
    rng = np.random.default_rng([seed, chunk])
    kdim = K.shape[0]
    best = (best_w, None)
    used = 0
    for _ in range(trials):
        used += 1
        R = K.copy()
        perm = rng.permutation(n)
        r = 0
        for c in perm:
            wd, bt = c >> 6, np.uint64(c & 63)
            col = (R[:, wd] >> bt) & np.uint64(1)
            cand = np.nonzero(col[r:])[0]
            if len(cand) == 0:
                continue
            p = r + cand[0]
            if p != r:
                R[[r, p]] = R[[p, r]]
            col[[r, p]] = col[[p, r]]
            mask = col.astype(bool)
            mask[r] = False
            R[mask] ^= R[r]
            r += 1
            if r == kdim:
                break
        # target parities of every row, packed into one word
        tpar = np.zeros(kdim, dtype=np.uint64)
        for i in range(T.shape[0]):
            tpar |= (_popcount(R & T[i]) & 1).astype(np.uint64) << np.uint64(i)
        wts = _popcount(R)
        ok = tpar != 0
        if ok.any():
            i = np.flatnonzero(ok)[np.argmin(wts[ok])]
            if wts[i] < best[0]:
                best = (int(wts[i]), R[i].copy())
        # pairs of rows
        X = R[:, None, :] ^ R[None, :, :]
        pw = _popcount(X)
        pt = tpar[:, None] ^ tpar[None, :]
        pw = np.where(pt != 0, pw, n + 1)
        j = np.argmin(pw)
        a, b = divmod(int(j), kdim)
        if pw[a, b] < best[0]:
            best = (int(pw[a, b]), X[a, b].copy())
    return best[0], best[1], used


def isd_min_weight(h: BitMatrix, targets: BitMatrix, budget: int = 10_000, seed: int = 0,
                   stop_at: int = 0) -> SearchResult | None:
    """Randomized upper bound. Trials are grouped in seeded chunks, so a larger
    budget always covers the rounds of a smaller one."""
    n = h.cols
    K = kernel_basis(h)
    if K.rows == 0 or budget <= 0:
        return None
    Kp, Tp = _pack(K), _pack(targets)
    best_w, best_row, used = n + 1, None, 0
    chunks = [(c, min(_CHUNK, budget - c * _CHUNK)) for c in range((budget + _CHUNK - 1) // _CHUNK)]
    workers = _threads()
    i = 0
    while i < len(chunks):
        batch = chunks[i:i + workers]
        i += len(batch)
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                res = list(ex.map(lambda ct: _isd_chunk(Kp, Tp, n, seed, ct[0], ct[1], n + 1), batch))
        else:
            res = [_isd_chunk(Kp, Tp, n, seed, c, t, n + 1) for c, t in batch]
        for w, row, u in res:  # batch order keeps the reduction deterministic
            used += u
            if row is not None and w < best_w:
                best_w, best_row = w, row
        if best_w <= stop_at:
            break
    if best_row is None:
        return None
    return SearchResult(best_w, _unpack(best_row, n), False, 0, used)


# ---------------------------------------------------------------------------
# combined search


def _absent(h: BitMatrix, targets: BitMatrix) -> bool:
    red = _Reducer(h.int_rows)
    return all(red.contains(t) for t in targets.int_rows)


def min_weight_logical(h: BitMatrix, targets: BitMatrix, limit: int | None = None,
                       budget: int = 10_000, seed: int = 0) -> SearchResult | None:
    """Exact up to ``limit`` (default: as far as memory allows), randomized beyond.

    Returns ``None`` when no kernel vector of ``h`` anticommutes with any
    target row.
    """
    if targets.rows == 0 or _absent(h, targets):
        return None
    lim = auto_limit(h.cols) if limit is None else min(limit, auto_limit(h.cols))
    res = exhaustive_min_weight(h, targets, lim, seed)
    if res is not None:
        return res
    lower = lim + 1
    r = isd_min_weight(h, targets, budget, seed, stop_at=lower)
    if r is None:
        raise CodeError(f"no logical of weight <= {lim} and the randomized search found none (budget {budget})")
    return SearchResult(r.weight, r.vector, r.weight <= lower, lower, r.trials)


def oracle_min_weight(h: BitMatrix, targets: BitMatrix, cap: int = ORACLE_CAP) -> int | None:
    """Brute force over all ``2**n`` vectors."""
    n = h.cols
    if n > cap:
        raise CodeError(f"oracle limited to n <= {cap}, got {n}")
    m, t = h.rows, targets.rows
    if m + t > 64:
        raise CodeError("oracle supports at most 64 syndrome bits")
    syn = np.zeros(1, dtype=np.uint64)
    wt = np.zeros(1, dtype=np.int16)
    for j in range(n):
        c = 0
        for i, r in enumerate(h.int_rows):
            c |= (r >> j & 1) << i
        for i, r in enumerate(targets.int_rows):
            c |= (r >> j & 1) << (m + i)
        syn = np.concatenate([syn, syn ^ np.uint64(c)])
        wt = np.concatenate([wt, wt + 1])
    hmask = np.uint64((1 << m) - 1)
    ok = ((syn & hmask) == 0) & ((syn >> np.uint64(m)) != 0) if m < 64 else (syn == 0)
    if not ok.any():
        return None
    return int(wt[ok].min())


# ---------------------------------------------------------------------------
# code-level reports


def _report(sides: dict, seed) -> DistanceReport:
    present = {k: v for k, v in sides.items() if v is not None}
    if not present:
        raise CodeError("no logical operators to protect")
    key = min(present, key=lambda s: present[s].weight)
    best = present[key]
    exact = all(r.exact for r in present.values()) or (
        best.exact and all(r.lower_bound >= best.weight for r in present.values()))
    side_reports = {
        k: DistanceReport(v.weight, v.exact, k, v.trials, seed, v.vector, v.lower_bound)
        for k, v in present.items()
    }
    return DistanceReport(best.weight, exact, key if len(present) == 1 else "min",
                          sum(r.trials for r in present.values()), seed, best.vector,
                          min(r.lower_bound for r in present.values()), side_reports)


def css_distance(code: CssCode, limit: int | None = None, budget: int = 10_000, seed: int = 0,
                 basis: LogicalBasis | None = None) -> DistanceReport:
    """Distance of a CSS code, minimum over X-type and Z-type logical errors."""
    if logical_count(code) == 0:
        raise CodeError("no logical qubits")
    basis = basis or canonical_logicals(code)
    sides = {
        "X": min_weight_logical(code.h_z, basis.j_z, limit, budget, seed),
        "Z": min_weight_logical(code.h_x, basis.j_x, limit, budget, seed),
    }
    return _report(sides, seed)


def dressed_distance(deformed, storages, limit: int | None = None, budget: int = 10_000,
                     seed: int = 0) -> DistanceReport:
    """Dressed distance of a deformed code given the storages of its kept Z logicals.

    X-type errors must commute with the deformed Z checks and flip a
    storage; Z-type errors must commute with the deformed X checks and flip
    a kept X logical. Sides are labelled for the measured-X view.
    """
    from .paint import check_storages

    d = deformed.as_x_type()
    check_storages(d, storages)
    zero = BitVector.zeros(d.ancilla_size)
    jx_ext = BitMatrix.from_vectors([v.concat(zero) for v in d.unmeasured], d.n)
    sides = {
        "X": min_weight_logical(d.hbar_z, storages.u_matrix(), limit, budget, seed),
        "Z": min_weight_logical(d.hbar_x, jx_ext, limit, budget, seed),
    }
    rep = _report(sides, seed)
    if deformed.kind == "Z":
        swap = {"X": "Z", "Z": "X", "min": "min"}
        rep = DistanceReport(rep.value, rep.exact, swap[rep.side], rep.trials, rep.seed, rep.witness,
                             rep.lower_bound,
                             {swap[k]: DistanceReport(v.value, v.exact, swap[k], v.trials, v.seed, v.witness,
                                                      v.lower_bound) for k, v in rep.sides.items()})
    return rep


def oracle_distance(code: CssCode, side: str = "min", basis: LogicalBasis | None = None) -> int:
    """Brute-force distance for codes with at most ``ORACLE_CAP`` qubits."""
    if code.n > ORACLE_CAP:
        raise CodeError(f"oracle limited to n <= {ORACLE_CAP}")
    if logical_count(code) == 0:
        raise CodeError("no logical qubits")
    basis = basis or canonical_logicals(code)
    vals = {}
    if side in ("X", "min"):
        vals["X"] = oracle_min_weight(code.h_z, basis.j_z)
    if side in ("Z", "min"):
        vals["Z"] = oracle_min_weight(code.h_x, basis.j_x)
    if not vals:
        raise CodeError(f"side must be X, Z or min, not {side!r}")
    return min(v for v in vals.values() if v is not None)
