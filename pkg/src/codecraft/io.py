"""Versioned JSON documents.

Every document is an object with ``schema_version`` and ``type``. Check
matrices are stored as sparse row supports over column indices; columns
follow the ``qubits`` list, rows follow ``x_stabs``/``z_stabs``. Qubit
labels are ``[kind, x, y]`` with kind ``"h"`` or ``"v"``, check labels are
``[x, y]``; both lists are in row-major lattice order for built codes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .bb import CodeError, CssCode, LogicalBasis, spec_from_dict
from .craft import DeformedCode
from .gf2 import BitMatrix, BitVector

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "SchemaError",
    "code_to_dict",
    "code_from_dict",
    "basis_to_dict",
    "basis_from_dict",
    "deformed_to_dict",
    "envelope",
    "dump",
    "load",
]


class SchemaError(CodeError):
    pass


def envelope(kind: str, body: dict) -> dict:
    d = {"schema_version": SCHEMA_VERSION, "type": kind}
    d.update(body)
    return d


def _check(d, kind: str) -> None:
    if not isinstance(d, dict):
        raise SchemaError("document must be a JSON object")
    if d.get("schema_version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {d.get('schema_version')!r}")
    if d.get("type") != kind:
        raise SchemaError(f"expected a {kind!r} document, got {d.get('type')!r}")


def _sparse(m: BitMatrix) -> list[list[int]]:
    return m.supports()


def _matrix(rows, cols: int, what: str) -> BitMatrix:
    try:
        for r in rows:
            for c in r:
                if not isinstance(c, int) or not 0 <= c < cols:
                    raise SchemaError(f"{what}: column index {c!r} out of range")
        return BitMatrix.from_supports(rows, cols)
    except TypeError as exc:
        raise SchemaError(f"{what}: malformed sparse rows") from exc


def code_to_dict(code: CssCode) -> dict:
    body = {
        "n": code.n,
        "h_x": _sparse(code.h_x),
        "h_z": _sparse(code.h_z),
        "qubits": [list(q) for q in code.qubit_coords],
        "x_stabs": [list(p) for p in code.xstab_coords],
        "z_stabs": [list(p) for p in code.zstab_coords],
    }
    if code.spec is not None:
        body["config"] = code.spec.to_dict()
    return envelope("css_code", body)


def code_from_dict(d: dict) -> CssCode:
    _check(d, "css_code")
    try:
        n = int(d["n"])
        hx = _matrix(d["h_x"], n, "h_x")
        hz = _matrix(d["h_z"], n, "h_z")
        qs = tuple((str(k), int(x), int(y)) for k, x, y in d.get("qubits", []))
        xs = tuple((int(x), int(y)) for x, y in d.get("x_stabs", []))
        zs = tuple((int(x), int(y)) for x, y in d.get("z_stabs", []))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed css_code document: {exc}") from exc
    spec = spec_from_dict(d["config"]) if "config" in d else None
    return CssCode(hx, hz, qs, xs, zs, spec)


def basis_to_dict(basis: LogicalBasis) -> dict:
    return envelope("logical_basis", {"n": basis.j_x.cols, "j_x": _sparse(basis.j_x), "j_z": _sparse(basis.j_z)})


def basis_from_dict(d: dict) -> LogicalBasis:
    _check(d, "logical_basis")
    try:
        n = int(d["n"])
        return LogicalBasis(_matrix(d["j_x"], n, "j_x"), _matrix(d["j_z"], n, "j_z"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed logical_basis document: {exc}") from exc


def _vec(v: BitVector | None):
    return None if v is None else v.support()


def deformed_to_dict(d: DeformedCode, extra: dict | None = None) -> dict:
    body = {
        "kind": d.kind,
        "n": d.n,
        "n_base": d.n_base,
        "ancilla_size": d.ancilla_size,
        "hbar_x": _sparse(d.hbar_x),
        "hbar_z": _sparse(d.hbar_z),
        "qubits": [list(q) for q in d.qubit_coords],
        "x_stabs": [list(p) for p in d.xstab_coords],
        "z_stabs": [list(p) for p in d.zstab_coords],
        "target": _vec(d.target),
        "g_mask": _vec(d.g_mask),
        "unmeasured": None if d.unmeasured is None else _sparse(d.unmeasured),
    }
    if extra:
        body.update(extra)
    return envelope("deformed_code", body)


def dump(doc: dict, path: str | Path | None = None) -> str:
    text = json.dumps(doc, indent=1, sort_keys=False)
    if path is not None:
        Path(path).write_text(text + "\n")
    return text


def load(path: str | Path) -> dict:
    try:
        d = json.loads(Path(path).read_text())
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(d, dict) or "schema_version" not in d:
        raise SchemaError(f"{path}: missing schema_version")
    return d
