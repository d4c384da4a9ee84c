import pytest

from codecraft.basis import (
    BasisError,
    build_joint_intermediates,
    joint_channel_space,
    optimize_basis,
    three_block_form,
)
from codecraft.bb import check_basis
from codecraft.craft import direct_sum_basis, measurement_channel
from codecraft.gf2 import BitMatrix, BitVector, in_rowspace

from conftest import bundled


def joint_witness(d, vec: BitVector) -> bool:
    """(vec, 0) in the row space of the measured-side checks."""
    h = d.hbar_x if d.kind == "X" else d.hbar_z
    return in_rowspace(h, vec.concat(BitVector.zeros(d.ancilla_size)))


@pytest.mark.parametrize("name", ["54", "180", "162"])
def test_optimized_basis(name):
    code = bundled(name)[0]
    sxx, szz = code.spec.extra["s_xx"], code.spec.extra["s_zz"]
    b = optimize_basis(code, sxx, szz)
    check_basis(code, b)
    assert b.j_x @ b.j_z.T == BitMatrix.identity(code.k)
    ji = build_joint_intermediates(code, sxx, szz)
    pair = direct_sum_basis(b, b)
    k = b.k
    xx = pair.j_x.row(0) + pair.j_x.row(k + 1)
    zz = pair.j_z.row(2) + pair.j_z.row(k + 3)
    assert joint_witness(ji.hxx, xx)
    assert joint_witness(ji.hzz, zz)


def test_three_block_pattern(code54):
    ji = build_joint_intermediates(code54, 8, 4)
    for d in (ji.hxx, ji.hzz):
        three_block_form(d)
        assert d.ancilla_size in (78, 54)


def test_channel_space_members_are_in_rowspace(code54):
    ji = build_joint_intermediates(code54, 8, 4)
    n = code54.n
    for side, d in (("X", ji.hxx), ("Z", ji.hzz)):
        h = d.hbar_x if side == "X" else d.hbar_z
        for a, b in joint_channel_space(d, side):
            v = BitVector(2 * n, a | (b << n)).concat(BitVector.zeros(d.ancilla_size))
            assert in_rowspace(h, v)


def test_separation_validation(code54):
    with pytest.raises(BasisError):
        optimize_basis(code54, 0, 4)


def test_single_logicals_lack_joint_channels(code54, basis54):
    ji = build_joint_intermediates(code54, 8, 4)
    zero = BitVector.zeros(code54.n)
    # X0 alone on the left block is not measurable through the joint
    assert measurement_channel(ji.hxx, basis54.j_x.row(0).concat(zero)) is None
