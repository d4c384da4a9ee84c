import json
from dataclasses import replace

import pytest

from codecraft.bb import (
    CodeError,
    LogicalBasis,
    Rect,
    build_planar_bb,
    canonical_logicals,
    check_basis,
    cutting_rule,
    load_config,
    logical_count,
    spec_from_dict,
    validate_css,
)
from codecraft.distance import exhaustive_min_weight
from codecraft.gf2 import BitMatrix, rank

from conftest import bundled, steane


@pytest.mark.parametrize("name,n,k", [("54", 54, 6), ("180", 180, 6), ("162", 162, 8)])
def test_bundled_codes(name, n, k):
    code, layout = bundled(name)
    assert (code.n, logical_count(code)) == (n, k)
    assert validate_css(code)
    assert (code.h_x @ code.h_z.T).is_zero()
    # cutting-rule closure: every column is used by both check types
    full = (1 << code.n) - 1
    assert code.h_x.column_mask() == full and code.h_z.column_mask() == full
    assert cutting_rule(code) is code
    assert set(code.qubit_coords) == set(layout.active_qubits)


def test_template_weights_54(code54):
    assert max(code54.h_x.row_weights()) == 6
    assert max(code54.h_z.row_weights()) == 6
    assert len(set(code54.qubit_coords)) == code54.n


def test_row_major_order(code54):
    keys = [(y, x, k) for k, x, y in code54.qubit_coords]
    assert keys == sorted(keys)
    xk = [(y, x) for x, y in code54.xstab_coords]
    assert xk == sorted(xk)


@pytest.mark.parametrize("dx,dy", [(1, 0), (0, 3), (-4, 7)])
def test_translation_invariance(code54, dx, dy):
    spec = code54.spec
    moved = replace(spec, region_x=spec.region_x.shifted(dx, dy), region_z=spec.region_z.shifted(dx, dy))
    c2, _ = build_planar_bb(moved)
    # row-major order is preserved by translation, so the matrices agree exactly
    assert c2.h_x == code54.h_x and c2.h_z == code54.h_z
    assert c2.qubit_coords == tuple((k, x + dx, y + dy) for k, x, y in code54.qubit_coords)


def test_canonical_logicals_54(code54):
    b = canonical_logicals(code54)
    assert b.k == 6
    assert b.pairing() == BitMatrix.identity(6)
    check_basis(code54, b)
    assert rank(BitMatrix.vstack(code54.h_x, b.j_x)) == rank(code54.h_x) + 6
    assert rank(BitMatrix.vstack(code54.h_z, b.j_z)) == rank(code54.h_z) + 6


def test_steane_logicals_have_weight_3():
    c = steane()
    b = canonical_logicals(c)
    assert b.k == 1
    # weight 3 is the minimum over the coset, found by exhaustive search
    for h, targets in ((c.h_z, b.j_z), (c.h_x, b.j_x)):
        best = exhaustive_min_weight(h, targets, 3)
        assert best is not None and best.weight == 3
    assert b.j_x.row(0).weight() == 3 and b.j_z.row(0).weight() == 3


def test_k_zero_is_an_error():
    h = BitMatrix.identity(3)
    from codecraft.bb import css_from_matrices

    with pytest.raises(CodeError):
        canonical_logicals(css_from_matrices(h, BitMatrix.zeros(1, 3)))


def test_check_basis_rejects_bad_pairing(code54):
    b = canonical_logicals(code54)
    swapped = LogicalBasis(b.j_x, b.j_z.select_rows([1, 0, 2, 3, 4, 5]))
    with pytest.raises(CodeError):
        check_basis(code54, swapped)


def test_targets(code54):
    b = canonical_logicals(code54)
    assert b.target("X0X1") == b.j_x.row(0) + b.j_x.row(1)
    for bad in ("X0Z1", "Y0", "X9", "X1X1"):
        with pytest.raises(CodeError):
            b.target(bad)


def test_config_errors(tmp_path):
    with pytest.raises(CodeError):
        spec_from_dict({"x_offsets": [[0, 0, "h"]]})
    with pytest.raises(CodeError):
        spec_from_dict({"x_offsets": [[0, 0, "q"]], "z_offsets": [[0, 0, "h"]],
                        "region_x": {"origin": [0, 0], "width": 2, "height": 2},
                        "region_z": {"origin": [0, 0], "width": 2, "height": 2}})
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(CodeError):
        load_config(p)
    with pytest.raises(CodeError):
        load_config(tmp_path / "missing.json")


def test_disjoint_regions_rejected(code54):
    spec = code54.spec
    with pytest.raises(CodeError):
        replace(spec, region_z=Rect(100, 100, 2, 2))


def test_config_roundtrip(code54, tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps(code54.spec.to_dict()))
    c2, _ = build_planar_bb(load_config(p))
    assert c2.h_x == code54.h_x and c2.h_z == code54.h_z
