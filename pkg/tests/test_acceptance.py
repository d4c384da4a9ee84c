"""Acceptance criteria 1-10.

Each test prints one ``criterion N: PASS|FAIL`` line to the terminal (also
without ``-s``) and then asserts. Shared grids are computed once per module.
"""

import functools
import itertools
import time

import pytest

from codecraft.basis import build_joint_intermediates, optimize_basis
from codecraft.bb import build_planar_bb, canonical_logicals, check_basis, load_config, logical_count, validate_css
from codecraft.craft import direct_sum_basis
from codecraft.distance import css_distance, dressed_distance, isd_min_weight, oracle_distance
from codecraft.gf2 import BitMatrix, BitVector, in_rowspace, rank
from codecraft.paint import PaintConfig, PaintFailure, constrained_kernel_basis, min_weight_constrained, paint
from codecraft.report import build_measurement, run_measurement
from codecraft.schedule import Network, plan, verify_schedule

from conftest import SMALL, bundled

X_ANC = [14, 26, 38, 50]
Z_ANC = [15, 24, 33]
DTH = 4


def report(capsys, n: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")


@functools.lru_cache(maxsize=None)
def basis(name):
    code = bundled(name)[0]
    return optimize_basis(code, code.spec.extra["s_xx"], code.spec.extra["s_zz"])


@functools.lru_cache(maxsize=None)
def grid54():
    """(target, ancilla) -> MeasurementRun with best-effort painting at d_th 4."""
    code, b = bundled("54")[0], basis("54")
    out = {}
    for i in range(code.k):
        for kind, sizes in (("X", X_ANC), ("Z", Z_ANC)):
            for a in sizes:
                out[(f"{kind}{i}", a)] = run_measurement(code, b, f"{kind}{i}", DTH, a, best_effort=True)
    return out


@functools.lru_cache(maxsize=None)
def two_block54():
    code, b = bundled("54")[0], basis("54")
    return {t: run_measurement(code, b, t, DTH, a) for t, a in (("X0*X1", 78), ("Z2*Z3", 54))}


def step8_holds(d) -> bool:
    x = d.as_x_type()
    zero = BitVector.zeros(x.ancilla_size)
    r = rank(x.hbar_x)
    if rank(x.hbar_x.append_rows([x.target.concat(zero).bits])) != r:
        return False
    kept = [v.concat(zero).bits for v in x.unmeasured]
    if len(kept) != x.base.h_x.cols - rank(x.base.h_x) - rank(x.base.h_z) - 1:
        return False
    return rank(x.hbar_x.append_rows(kept)) == r + len(kept)


def pairing_ok(d, s) -> bool:
    x = d.as_x_type()
    comm = all(x.hbar_x.mul_vec(u).bits == 0 for u in s.u)
    return comm and s.pairing(x) == BitMatrix.identity(len(s.u))


def test_criterion_1_construction(capsys):
    rows, ok = [], True
    for name, (n, k) in (("54", (54, 6)), ("180", (180, 6)), ("162", (162, 8))):
        t = time.perf_counter()
        code, _ = build_planar_bb(load_config(name))
        dt = time.perf_counter() - t
        good = code.n == n and logical_count(code) == k and validate_css(code) and dt < 1.0
        ok &= good
        rows.append(f"[[{code.n},{logical_count(code)}]] {dt:.2f}s")
    report(capsys, 1, ok, "; ".join(rows))
    assert ok


def test_criterion_2_distance54(capsys):
    t = time.perf_counter()
    rep = css_distance(bundled("54")[0])
    dt = time.perf_counter() - t
    ok = rep.exact and rep.value == 4 and dt < 120
    report(capsys, 2, ok, f"d={rep.value} exact={rep.exact} {dt:.1f}s")
    assert ok


def test_criterion_3_single_targets(capsys):
    t = time.perf_counter()
    g = grid54()
    dt = time.perf_counter() - t
    reached, monotone = {}, True
    for (target, a), run in g.items():
        monotone &= run.orange.value >= run.blue.value
        if run.orange.value >= DTH:
            reached.setdefault(target, a)
    k = bundled("54")[0].k
    missing = [f"{c}{i}" for c in "XZ" for i in range(k) if f"{c}{i}" not in reached]
    ok = not missing and monotone and dt < 1800
    cells = " ".join(f"{t}@{a}" for t, a in sorted(reached.items()))
    report(capsys, 3, ok, f"first ancilla reaching 4: {cells}; missing={missing} orange>=blue={monotone} {dt:.0f}s")
    assert ok


def test_criterion_4_two_block(capsys):
    runs = two_block54()
    vals = {t: (r.blue.value, None if r.orange is None else r.orange.value, r.ancilla) for t, r in runs.items()}
    ok = all(r.ok and r.orange.value >= DTH for r in runs.values())
    report(capsys, 4, ok, " ".join(f"{t}@{a}: {b}->{o}" for t, (b, o, a) in vals.items()))
    assert ok


def test_criterion_5_step8(capsys):
    code, b = bundled("54")[0], basis("54")
    ds = [build_measurement(code, b, t, a) for t, a in grid54()]
    ds += [build_measurement(code, b, t, a) for t, a in (("X0*X1", 78), ("Z2*Z3", 54))]
    ds += [build_measurement(code, b, "X0X3", None), build_measurement(code, b, "Z1Z2", None)]
    c180, b180 = bundled("180")[0], basis("180")
    ds += [build_measurement(c180, b180, f"X{i}", 32) for i in range(c180.k)]
    ds += [build_measurement(c180, b180, f"Z{i}", 27) for i in range(c180.k)]
    good = sum(step8_holds(d) for d in ds)
    ok = good == len(ds)
    report(capsys, 5, ok, f"{good}/{len(ds)} deformed codes")
    assert ok


def _light_kernel_vectors(h: BitMatrix, wmax: int) -> list[int]:
    cols = h.T.int_rows
    out = []
    for w in range(1, wmax + 1):
        for sup in itertools.combinations(range(h.cols), w):
            syn = 0
            for j in sup:
                syn ^= cols[j]
            if not syn:
                out.append(sum(1 << j for j in sup))
    return out


def test_criterion_6_paint_invariants(capsys):
    code, b = bundled("54")[0], basis("54")
    cells = [key for key, run in grid54().items() if run.d_th == DTH]
    cells += [("X0*X1", 78), ("Z2*Z3", 54)]
    iters, bad = 0, []
    for t, a in cells:
        d = build_measurement(code, b, t, a)
        seen = []
        post = paint(d, constrained_kernel_basis(d), PaintConfig(DTH), callback=lambda _, s: seen.append(pairing_ok(d, s)))
        iters += post.iterations
        light = any(min_weight_constrained(d.as_x_type().hbar_z, u, DTH - 1) is not None for u in post.u)
        if not all(seen) or not pairing_ok(d, post) or light:
            bad.append(f"{t}@{a}")
    # failure fixture: no admissible update exists, checked by linear algebra
    d = build_measurement(code, b, "X0", 14)
    init = constrained_kernel_basis(d)
    try:
        paint(d, init, PaintConfig(DTH))
        genuine = False
    except PaintFailure as exc:
        light = _light_kernel_vectors(d.as_x_type().hbar_z, DTH - 1)
        vs = [v.bits for v in init.v]
        rows = [sum((((e & v).bit_count() & 1) << j) for j, v in enumerate(vs)) for e in light]
        rhs = [(e & init.u[exc.index].bits).bit_count() & 1 for e in light]
        aug = BitMatrix([r | (s << len(vs)) for r, s in zip(rows, rhs)], len(vs) + 1)
        genuine = rank(aug) == rank(BitMatrix(rows, len(vs))) + 1
    ok = not bad and genuine
    report(capsys, 6, ok, f"{len(cells)} runs, {iters} updates checked, violations={bad}, failure fixture genuine={genuine}")
    assert ok


def test_criterion_7_basis(capsys):
    t = time.perf_counter()
    rows, ok = [], True
    for name in ("54", "180", "162"):
        code = bundled(name)[0]
        sxx, szz = code.spec.extra["s_xx"], code.spec.extra["s_zz"]
        bb = optimize_basis(code, sxx, szz)
        check_basis(code, bb)
        ident = bb.j_x @ bb.j_z.T == BitMatrix.identity(code.k)
        ji = build_joint_intermediates(code, sxx, szz)
        pair = direct_sum_basis(bb, bb)
        xx = pair.j_x.row(0) + pair.j_x.row(code.k + 1)
        zz = pair.j_z.row(2) + pair.j_z.row(code.k + 3)
        wx = in_rowspace(ji.hxx.hbar_x, xx.concat(BitVector.zeros(ji.hxx.ancilla_size)))
        wz = in_rowspace(ji.hzz.hbar_z, zz.concat(BitVector.zeros(ji.hzz.ancilla_size)))
        ok &= ident and wx and wz
        rows.append(f"{name}: identity={ident} XX={wx} ZZ={wz}")
    dt = time.perf_counter() - t
    ok &= dt < 600
    report(capsys, 7, ok, "; ".join(rows) + f" {dt:.1f}s")
    assert ok


def test_criterion_8_oracle(capsys):
    bad = []
    names = sorted(SMALL)
    for name in names:
        code = SMALL[name][0]()
        assert code.n <= 24
        want = oracle_distance(code)
        if css_distance(code).value != want:
            bad.append(f"{name}:exhaustive")
        lb = canonical_logicals(code)
        for seed in range(5):
            got = min(isd_min_weight(code.h_z, lb.j_z, 300, seed).weight,
                      isd_min_weight(code.h_x, lb.j_x, 300, seed).weight)
            if got != want:
                bad.append(f"{name}:seed{seed}")
    ok = not bad
    report(capsys, 8, ok, f"{len(names)} fixtures x 5 seeds, mismatches={bad}")
    assert ok


def test_criterion_9_180_x2(capsys):
    code, b = bundled("180")[0], basis("180")
    t = time.perf_counter()
    d = build_measurement(code, b, "X2", 32)
    init = constrained_kernel_basis(d)
    pre = dressed_distance(d, init, budget=10_000)
    try:
        post = paint(d, init, PaintConfig(7, budget=10_000))
        iters, succeeded = post.iterations, True
    except PaintFailure:
        iters, succeeded = None, False
    dt = time.perf_counter() - t
    ok = pre.value <= 7 and succeeded and iters == 0 and dt < 1800
    report(capsys, 9, ok, f"pre-paint {pre.value}, paint d_th=7 succeeded={succeeded} updates={iters} {dt:.0f}s")
    assert ok


def test_criterion_10_schedules(capsys):
    t = time.perf_counter()
    res = verify_schedule(plan("cnot", Network.chain(3), control=0, target=2, ancilla=1))
    res2 = verify_schedule(plan("transfer", Network.chain(2), source=0, target=1))
    dt = time.perf_counter() - t
    ok = len(res) == 16 and len(res2) == 16 and all(o for _, o in res + res2) and dt < 1.0
    report(capsys, 10, ok, f"cnot {sum(o for _, o in res)}/16, transfer {sum(o for _, o in res2)}/16, {dt*1000:.0f}ms")
    assert ok
