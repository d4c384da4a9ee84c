import itertools

import pytest

from codecraft.bb import CodeError
from codecraft.distance import dressed_distance, exhaustive_min_weight
from codecraft.gf2 import BitMatrix, BitVector, in_rowspace, rank
from codecraft.paint import (
    PaintConfig,
    PaintFailure,
    StorageSet,
    check_storages,
    constrained_kernel_basis,
    feedback_correction,
    min_weight_constrained,
    paint,
    storages_for,
)
from codecraft.report import build_measurement


def pairing_ok(d, s: StorageSet) -> bool:
    x = d.as_x_type()
    comm = all(x.hbar_x.mul_vec(u).bits == 0 for u in s.u)
    return comm and s.pairing(x) == BitMatrix.identity(len(s.u))


def min_weights(d, s):
    x = d.as_x_type()
    out = []
    for u in s.u:
        r = exhaustive_min_weight(x.hbar_z, BitMatrix([u.bits], u.len), 4)
        out.append(r.weight if r else 5)
    return out


@pytest.mark.parametrize("target,ancilla", [("X3", 26), ("X0", 38), ("Z1", 24), ("X0*X1", 78), ("Z2*Z3", 54)])
def test_invariants_hold_every_iteration(code54, basis54, target, ancilla):
    d = build_measurement(code54, basis54, target, ancilla)
    init = constrained_kernel_basis(d)
    assert pairing_ok(d, init)
    seen = []

    def cb(a, s):
        seen.append(pairing_ok(d, s))

    post = paint(d, init, PaintConfig(4), callback=cb)
    assert all(seen) and len(seen) == post.iterations
    assert pairing_ok(d, post)
    assert min(min_weights(d, post)) >= 4
    # painting never lowers the dressed distance
    pre = dressed_distance(d, init).value
    after = dressed_distance(d, post).value
    assert after >= pre and after == 4


def test_failure_path(code54, basis54):
    d = build_measurement(code54, basis54, "X0", 14)
    init = constrained_kernel_basis(d)
    with pytest.raises(PaintFailure) as info:
        paint(d, init, PaintConfig(4))
    e = info.value.error
    x = d.as_x_type()
    # the reported error is undetectable and still flips the failing storage
    assert x.hbar_z.mul_vec(e).bits == 0
    assert e.weight() < 4


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


def test_failure_is_genuine(code54, basis54):
    # independent check: no x in span(v) makes u_a + x orthogonal to every
    # undetectable error of weight < 4
    d = build_measurement(code54, basis54, "X0", 14)
    init = constrained_kernel_basis(d)
    with pytest.raises(PaintFailure) as info:
        paint(d, init, PaintConfig(4))
    a = info.value.index
    x = d.as_x_type()
    light = _light_kernel_vectors(x.hbar_z, 3)
    u = init.u[a].bits
    vs = [v.bits for v in init.v]
    rows = [sum((((e & v).bit_count() & 1) << j) for j, v in enumerate(vs)) for e in light]
    rhs = [(e & u).bit_count() & 1 for e in light]
    m = BitMatrix(rows, len(vs))
    aug = BitMatrix([r | (b << len(vs)) for r, b in zip(rows, rhs)], len(vs) + 1)
    assert rank(aug) == rank(m) + 1


def test_trivial_threshold_makes_no_update(code54, basis54):
    d = build_measurement(code54, basis54, "X5", 14)
    init = constrained_kernel_basis(d)
    post = paint(d, init, PaintConfig(1))
    assert post.iterations == 0 and post.u == init.u


def test_config_validation():
    with pytest.raises(CodeError):
        PaintConfig(0)


def test_min_weight_constrained_matches_exhaustive(code54, basis54):
    d = build_measurement(code54, basis54, "X3", 14)
    init = constrained_kernel_basis(d)
    for u in init.u:
        e = min_weight_constrained(d.hbar_z, u, 4)
        r = exhaustive_min_weight(d.hbar_z, BitMatrix([u.bits], u.len), 4)
        assert (e is None) == (r is None)
        if e is not None:
            assert e.weight() == r.weight and e.dot(u) == 1


def test_storage_decomposition_and_feedback(code54, basis54):
    d = build_measurement(code54, basis54, "X3", 26)
    post = paint(d, constrained_kernel_basis(d), PaintConfig(4))
    sts = storages_for(d, post, basis54)
    for st, u in zip(sts, post.u):
        assert (st.j_z + st.h_z).concat(st.beta) == u
        assert in_rowspace(code54.h_z, st.h_z)
    outcomes = BitVector.zeros(d.ancilla_size)
    assert feedback_correction(sts, outcomes).is_identity()
    flips = []
    for i in range(d.ancilla_size):
        o = BitVector.from_support(d.ancilla_size, [i])
        flips.append(feedback_correction(sts, o).flips)
    for a, st in enumerate(sts):
        assert [f[a] for f in flips] == [st.beta[i] for i in range(d.ancilla_size)]
    with pytest.raises(CodeError):
        feedback_correction(sts, BitVector.zeros(d.ancilla_size + 1))


def test_check_storages_rejects_tampering(code54, basis54):
    d = build_measurement(code54, basis54, "X3", 26)
    s = constrained_kernel_basis(d)
    bad = StorageSet((s.u[1], s.u[0]) + s.u[2:], s.v, s.h_rows, s.unmeasured)
    with pytest.raises(CodeError):
        check_storages(d, bad)
