import pytest

from codecraft.bb import canonical_logicals
from codecraft.craft import (
    CraftError,
    StretchParams,
    as_intermediate,
    joint_connect,
    length_for_ancilla,
    measurement_channel,
    minimal_length,
    prepare_intermediate,
    rough_directions,
    stretch,
    two_block_pipeline,
    x_cut,
    x_pipeline,
    z_cut,
    z_pipeline_by_duality,
)
from codecraft.gf2 import BitMatrix, BitVector, rank
from codecraft.report import build_measurement


def step8_holds(d) -> bool:
    """Target in the measured row space, every kept logical independent of it."""
    x = d.as_x_type()
    zero = BitVector.zeros(x.ancilla_size)
    r = rank(x.hbar_x)
    if rank(x.hbar_x.append_rows([x.target.concat(zero).bits])) != r:
        return False
    kept = [v.concat(zero).bits for v in x.unmeasured]
    if len(kept) != x.base.h_x.cols - rank(x.base.h_x) - rank(x.base.h_z) - 1:
        return False
    return rank(x.hbar_x.append_rows(kept)) == r + len(kept)


def test_rough_directions(code54):
    assert rough_directions(code54.spec) == ("left", "right")
    assert rough_directions(code54.dual().spec) == ("bottom", "top")


def test_smooth_boundary_rejected(code54):
    with pytest.raises(CraftError):
        stretch(code54, StretchParams("top", 3))
    with pytest.raises(CraftError):
        StretchParams("right", 0)


@pytest.mark.parametrize("name,xs,zs", [
    ("54", [14, 26, 38, 50], [15, 24, 33, 42]),
    ("180", [32, 56, 80, 104], [27, 42, 57, 72]),
])
def test_intermediate_ancilla_sizes(name, xs, zs):
    from conftest import bundled

    code = bundled(name)[0]
    L, _ = minimal_length(code, "right")
    got = [prepare_intermediate(code, "right", L + i).ancilla_size for i in range(4)]
    assert got == xs
    Lz, _ = minimal_length(code.dual(), "top")
    got = [prepare_intermediate(code.dual(), "top", Lz + i).ancilla_size for i in range(4)]
    assert got == zs


def test_block_form_and_channels(code54):
    inter = prepare_intermediate(code54, "right", 3)
    inter.check()
    bl = inter.blocks()
    assert bl["0_top"].is_zero() and bl["0_bottom"].is_zero()
    assert bl["H_X"] == code54.h_x and bl["H_Z"] == code54.h_z
    b = canonical_logicals(code54)
    for a in range(6):
        ch = measurement_channel(inter, b.j_x.row(a))
        assert ch is not None
        lhs = inter.hbar_x.vec_mul(ch.g)
        assert lhs == b.j_x.row(a).concat(BitVector.zeros(inter.ancilla_size))


def test_z_cut_leaves_no_logical(code54):
    s = stretch(code54, StretchParams("right", 3))
    c = z_cut(s, 3)
    inter = as_intermediate(code54, c)
    merged = inter.as_css()
    # every base X logical is a product of deformed X checks
    b = canonical_logicals(code54)
    zero = BitVector.zeros(inter.ancilla_size)
    r = rank(merged.h_x)
    for v in b.j_x:
        assert rank(merged.h_x.append_rows([v.concat(zero).bits])) == r
    with pytest.raises(CraftError):
        z_cut(s, 2)


def test_length_for_ancilla(code54):
    assert length_for_ancilla(code54, 26) == 4
    with pytest.raises(CraftError):
        length_for_ancilla(code54, 27)


@pytest.mark.parametrize("target", ["X0", "X1", "X2", "X3", "X4", "X5", "X0X1", "X2X5"])
@pytest.mark.parametrize("ancilla", [14, 26, 50])
def test_step8_x_targets(code54, basis54, target, ancilla):
    d = build_measurement(code54, basis54, target, ancilla)
    d.check()
    assert d.kind == "X"
    assert d.target == basis54.target(target)
    assert step8_holds(d)


@pytest.mark.parametrize("target", ["Z0", "Z1", "Z2", "Z3", "Z4", "Z5", "Z0Z5"])
@pytest.mark.parametrize("ancilla", [15, 33])
def test_step8_z_targets(code54, basis54, target, ancilla):
    d = build_measurement(code54, basis54, target, ancilla)
    d.check()
    assert d.kind == "Z"
    assert step8_holds(d)


def test_x_cut_only_keeps_channel_rows(code54, basis54):
    inter = prepare_intermediate(code54, "right", 6)
    d = x_cut(inter, basis54.target("X3"), basis54)
    assert d.hbar_x.rows - code54.h_x.rows <= d.g_mask.weight()
    assert d.ancilla_size <= inter.ancilla_size
    # new Z checks never touch base qubits
    assert d.blocks()["0_bottom"].is_zero()


def test_x_cut_rejects_z_intermediate(code54, basis54):
    inter = prepare_intermediate(code54.dual(), "top", 4).dual()
    with pytest.raises(CraftError):
        x_cut(inter, basis54.target("X0"), basis54)


def test_two_block(code54, basis54):
    xx = two_block_pipeline(code54, basis54, "horizontal", 8, 0, 1)
    assert xx.kind == "X" and xx.meta["intermediate"].ancilla_size == 78
    assert step8_holds(xx)
    zz = two_block_pipeline(code54, basis54, "vertical", 4, 2, 3)
    assert zz.kind == "Z" and zz.meta["intermediate"].ancilla_size == 54
    assert step8_holds(zz)


def test_joint_intermediate_channels_are_partial(code54):
    # only some logicals of the two-block system have a horizontal channel
    inter = joint_connect(code54, code54, "horizontal", 8)
    b = canonical_logicals(code54)
    zero = BitVector.zeros(code54.n)
    found = [measurement_channel(inter, v.concat(zero)) is not None for v in b.j_x]
    assert not all(found)


def test_z_pipeline_matches_dual(code54, basis54):
    d = z_pipeline_by_duality(code54, basis54, "Z2", "top", 4)
    x = x_pipeline(code54.dual(), basis54.dual(), "X2", "top", 4)
    assert d.dual().hbar_x == x.hbar_x and d.dual().hbar_z == x.hbar_z
