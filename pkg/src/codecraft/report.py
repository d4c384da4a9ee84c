"""End-to-end measurement runs shared by the CLI and the tests."""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field

from .basis import optimize_basis
from .bb import CodeError, CssCode, LogicalBasis, canonical_logicals, parse_target
from .craft import (
    CraftError,
    DeformedCode,
    length_for_ancilla,
    two_block_pipeline,
    x_pipeline,
    z_pipeline_by_duality,
)
from .distance import DistanceReport, dressed_distance
from .paint import PaintConfig, PaintFailure, StorageSet, constrained_kernel_basis, paint

__all__ = ["resolve_basis", "split_two_block", "build_measurement", "MeasurementRun", "run_measurement"]


def resolve_basis(code: CssCode, mode: str = "auto") -> LogicalBasis:
    """``canonical``, ``optimized`` (needs ``s_xx``/``s_zz`` in the config) or
    ``auto`` (optimized when the separations are known)."""
    extra = code.spec.extra if code.spec is not None else {}
    have = "s_xx" in extra and "s_zz" in extra
    if mode == "canonical" or (mode == "auto" and not have):
        return canonical_logicals(code)
    if mode in ("optimized", "auto"):
        if not have:
            raise CodeError("optimized basis needs s_xx and s_zz in the config")
        return optimize_basis(code, int(extra["s_xx"]), int(extra["s_zz"]))
    raise CodeError(f"unknown basis mode {mode!r}")


def split_two_block(target: str) -> tuple[str, str] | None:
    """``"X0*X1"`` (or ``"X0⊗X1"``) -> ``("X0", "X1")``; None for one block."""
    for sep in ("*", "⊗"):
        if sep in target:
            a, _, b = target.partition(sep)
            return a.strip(), b.strip()
    return None


def build_measurement(code: CssCode, basis: LogicalBasis, target: str, ancilla: int | None = None,
                      direction: str | None = None) -> DeformedCode:
    """Deformed code measuring ``target``.

    ``"X2"``, ``"Z0"`` and products such as ``"X0X3"`` act on one block.
    ``"X0*X1"`` couples two blocks side by side and ``"Z2*Z3"`` two blocks
    stacked vertically, using the separations stored in the config.
    ``ancilla`` selects the stretch by the intermediate's ancilla count;
    None takes the shortest valid stretch.
    """
    pair = split_two_block(target)
    if pair is None:
        kind, _ = parse_target(target)
        if kind == "X":
            dirn = direction or "right"
            length = None if ancilla is None else length_for_ancilla(code, ancilla, dirn)
            return x_pipeline(code, basis, target, dirn, length)
        dirn = direction or "top"
        length = None if ancilla is None else length_for_ancilla(code.dual(), ancilla, dirn)
        return z_pipeline_by_duality(code, basis, target, dirn, length)
    (ka, ia), (kb, ib) = parse_target(pair[0]), parse_target(pair[1])
    if ka != kb or len(ia) != 1 or len(ib) != 1:
        raise CodeError(f"two-block target must look like X0*X1 or Z2*Z3, not {target!r}")
    extra = code.spec.extra if code.spec is not None else {}
    key = "s_xx" if ka == "X" else "s_zz"
    if key not in extra:
        raise CodeError(f"two-block target needs {key} in the config")
    orient = "horizontal" if ka == "X" else "vertical"
    d = two_block_pipeline(code, basis, orient, int(extra[key]), ia[0], ib[0])
    inter = d.meta.get("intermediate")
    if ancilla is not None and inter is not None and inter.ancilla_size != ancilla:
        raise CraftError(f"two-block joint has ancilla size {inter.ancilla_size}, not {ancilla}")
    return d


@dataclass
class MeasurementRun:
    target: str
    ancilla: int
    ancilla_after_cut: int
    blue: DistanceReport
    orange: DistanceReport | None
    d_th: int
    iterations: int = 0
    failure: str | None = None
    seconds: float = 0.0
    storages: StorageSet | None = field(default=None, repr=False)

    @property
    def ok(self) -> bool:
        return self.orange is not None

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "ancilla": self.ancilla,
            "ancilla_after_cut": self.ancilla_after_cut,
            "d_th": self.d_th,
            "blue": self.blue.value,
            "orange": None if self.orange is None else self.orange.value,
            "blue_report": self.blue.to_dict(),
            "orange_report": None if self.orange is None else self.orange.to_dict(),
            "iterations": self.iterations,
            "failure": self.failure,
            "seconds": round(self.seconds, 3),
        }


def run_measurement(code: CssCode, basis: LogicalBasis, target: str, d_th: int,
                    ancilla: int | None = None, limit: int | None = None, budget: int = 10_000,
                    seed: int = 0, direction: str | None = None, verbose: bool = False,
                    best_effort: bool = False) -> MeasurementRun:
    """Build, paint and report pre-/post-paint dressed distances.

    With ``best_effort`` a failed painting is retried with smaller
    thresholds; ``d_th`` of the result is then the largest one reached and
    ``failure`` keeps the message of the first failure.
    """
    t0 = time.perf_counter()
    d = build_measurement(code, basis, target, ancilla, direction)
    inter = d.meta.get("intermediate")
    size = inter.ancilla_size if inter is not None else d.ancilla_size
    init = constrained_kernel_basis(d)
    blue = dressed_distance(d, init, limit, budget, seed)
    if verbose:
        print(f"{target}: ancilla {size}, pre-paint {blue.value}", file=sys.stderr)
    failure = None
    for t in range(d_th, 0, -1):
        try:
            post = paint(d, init, PaintConfig(t, limit, budget, seed))
        except PaintFailure as exc:
            failure = failure or str(exc)
            if not best_effort:
                return MeasurementRun(target, size, d.ancilla_size, blue, None, d_th, 0, failure,
                                      time.perf_counter() - t0, init)
            continue
        orange = dressed_distance(d, post, limit, budget, seed)
        return MeasurementRun(target, size, d.ancilla_size, blue, orange, t, post.iterations,
                              failure, time.perf_counter() - t0, post)
    raise AssertionError("painting with d_th = 1 cannot fail")
