"""``codecraft`` command line.

Exit codes: 0 success, 1 algorithmic failure (painting failed, no channel,
no basis), 2 bad input (missing files, malformed configs or flags).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import io
from .basis import BasisError
from .bb import CodeError, build_planar_bb, check_basis, load_config, logical_count, validate_css
from .craft import CraftError
from .distance import css_distance
from .paint import PaintFailure
from .report import build_measurement, resolve_basis, run_measurement
from .schedule import Network, ScheduleError, plan, verify_schedule
from .svg import render_svg

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(args):
    if not args.config:
        raise InputError("--config is required")
    try:
        spec = load_config(args.config)
        code, layout = build_planar_bb(spec)
    except CodeError as exc:
        raise InputError(f"config error: {exc}") from exc
    return code, layout


def _emit(args, doc=None, svg: str | None = None) -> None:
    text = svg if svg is not None else io.dump(doc)
    if args.out:
        Path(args.out).write_text(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _target(args) -> str:
    if not args.target:
        raise InputError("--target is required")
    return args.target


def cmd_build(args) -> int:
    code, layout = _load(args)
    if args.format == "svg":
        _emit(args, svg=render_svg(code, code.spec.name, layout))
        return EXIT_OK
    doc = io.code_to_dict(code)
    doc["k"] = logical_count(code)
    doc["css_ok"] = validate_css(code)
    _emit(args, doc)
    return EXIT_OK


def cmd_craft(args) -> int:
    code, _ = _load(args)
    basis = resolve_basis(code, args.basis)
    d = build_measurement(code, basis, _target(args), args.ancilla, args.direction)
    inter = d.meta.get("intermediate")
    if args.format == "svg":
        _emit(args, svg=render_svg(d, args.target))
        return EXIT_OK
    extra = {"measured": args.target, "ancilla_intermediate": inter.ancilla_size if inter else None}
    _emit(args, io.deformed_to_dict(d, extra))
    return EXIT_OK


def cmd_paint(args) -> int:
    code, _ = _load(args)
    basis = resolve_basis(code, args.basis)
    dth = args.dth if args.dth is not None else int(code.spec.extra.get("expected", {}).get("d", 0) or 0)
    if dth < 1:
        raise InputError("--dth is required when the config has no expected distance")
    run = run_measurement(code, basis, _target(args), dth, args.ancilla, args.limit, args.budget,
                          args.seed, args.direction, verbose=not args.quiet, best_effort=args.best_effort)
    doc = io.envelope("paint_report", run.to_dict())
    if run.storages is not None:
        doc["storages"] = [u.support() for u in run.storages.u]
    _emit(args, doc)
    if not run.ok or run.d_th < dth:
        print(f"codecraft: {run.failure}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_distance(args) -> int:
    code, _ = _load(args)
    if args.target:
        basis = resolve_basis(code, args.basis)
        run = run_measurement(code, basis, args.target, 1, args.ancilla, args.limit, args.budget, args.seed,
                              args.direction, verbose=False)
        rep = run.blue
        doc = io.envelope("distance_report", {"of": f"deformed:{args.target}", **rep.to_dict()})
    else:
        rep = css_distance(code, args.limit, args.budget, args.seed)
        doc = io.envelope("distance_report", {"of": code.spec.name or "code", **rep.to_dict()})
    _emit(args, doc)
    return EXIT_OK


def cmd_basis(args) -> int:
    code, _ = _load(args)
    basis = resolve_basis(code, args.basis if args.basis != "auto" else "optimized")
    check_basis(code, basis)
    doc = io.basis_to_dict(basis)
    doc["weights"] = {"j_x": basis.j_x.row_weights(), "j_z": basis.j_z.row_weights()}
    _emit(args, doc)
    return EXIT_OK


def _network(args) -> Network:
    if args.network:
        try:
            return Network.from_dict(json.loads(Path(args.network).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read network: {exc}") from exc
    rounds = args.rounds
    if rounds is None and args.config:
        rounds = int(load_config(args.config).extra.get("expected", {}).get("d", 1))
    return Network.chain(3, rounds or 1)


def cmd_plan(args) -> int:
    net = _network(args)
    kw = {"rounds": args.rounds}
    if args.kind == "cnot":
        kw.update(control=args.control, target=args.target_qubit, ancilla=args.via)
    elif args.kind == "transfer":
        kw.update(source=args.source, target=args.target_qubit)
    else:
        t = args.target or ""
        if len(t) < 2 or t[0] not in "XZ" or not t[1:].isdigit():
            raise InputError("measure needs --target like X0 or Z3")
        kw.update(basis=t[0], qubit=int(t[1:]))
    sched = plan(args.kind, net, **kw)
    doc = io.envelope("schedule", sched.to_dict())
    if args.kind != "measure":
        checks = verify_schedule(sched)
        doc["verified"] = all(ok for _, ok in checks)
        doc["checks"] = {label: ok for label, ok in checks}
    _emit(args, doc)
    return EXIT_OK if doc.get("verified", True) else EXIT_FAIL


def cmd_render(args) -> int:
    code, layout = _load(args)
    if args.target:
        basis = resolve_basis(code, args.basis)
        obj = build_measurement(code, basis, args.target, args.ancilla, args.direction)
        svg = render_svg(obj, args.target)
    else:
        svg = render_svg(code, code.spec.name, layout)
    _emit(args, svg=svg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="codecraft", description="Planar BB codes and logical measurements by code surgery.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, target=True):
        sp.add_argument("--config", help="config file, or the name of a bundled code (54, 180, 162)")
        if target:
            sp.add_argument("--target", help="logical target: X0, Z3, X0X2 (one block), X0*X1 (two blocks)")
            sp.add_argument("--ancilla", type=int, help="ancilla size of the intermediate code")
            sp.add_argument("--direction", help="boundary to stretch (default right for X, top for Z)")
            sp.add_argument("--basis", default="auto", choices=["auto", "canonical", "optimized"])
        sp.add_argument("--out", help="write to this file instead of stdout")
        sp.add_argument("--format", default="json", choices=["json", "svg"])

    def search(sp):
        sp.add_argument("--budget", type=int, default=10_000, help="randomized search rounds")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--limit", type=int, help="exhaustive search radius (default: automatic)")

    common(sub.add_parser("build", help="build a code from a config"), target=False)
    common(sub.add_parser("craft", help="build the deformed code for a target"))
    sp = sub.add_parser("paint", help="craft, paint and report dressed distances")
    common(sp)
    search(sp)
    sp.add_argument("--dth", type=int, help="distance threshold (default: the config's expected d)")
    sp.add_argument("--best-effort", action="store_true", help="on failure retry with smaller thresholds")
    sp.add_argument("--quiet", action="store_true")
    sp = sub.add_parser("distance", help="distance of a code, or pre-paint dressed distance of a target")
    common(sp)
    search(sp)
    sp = sub.add_parser("basis", help="optimized logical basis")
    common(sp, target=False)
    sp.add_argument("--basis", default="optimized", choices=["auto", "canonical", "optimized"])
    sp = sub.add_parser("plan", help="logical CNOT, state transfer or single measurement schedule")
    sp.add_argument("kind", choices=["cnot", "transfer", "measure"])
    sp.add_argument("--config", help="code config; its expected distance sets the rounds")
    sp.add_argument("--network", help="JSON file listing available joint measurements")
    sp.add_argument("--control", type=int, default=0)
    sp.add_argument("--via", type=int, default=1, help="ancilla logical qubit for cnot")
    sp.add_argument("--source", type=int, default=0)
    sp.add_argument("--to", dest="target_qubit", type=int, default=None, help="target logical qubit")
    sp.add_argument("--target", help="measurement target for 'measure', e.g. X0")
    sp.add_argument("--rounds", type=int, help="measurement rounds d_T")
    sp.add_argument("--out")
    sp = sub.add_parser("render", help="SVG lattice diagram")
    common(sp)
    return p


COMMANDS = {
    "build": cmd_build,
    "craft": cmd_craft,
    "paint": cmd_paint,
    "distance": cmd_distance,
    "basis": cmd_basis,
    "plan": cmd_plan,
    "render": cmd_render,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "plan" and args.target_qubit is None:
        args.target_qubit = 2 if args.kind == "cnot" else 1
    try:
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"codecraft: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (PaintFailure, CraftError, BasisError) as exc:
        print(f"codecraft: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ScheduleError as exc:
        print(f"codecraft: {exc}", file=sys.stderr)
        return EXIT_FAIL if "no deformed code" in str(exc) else EXIT_INPUT
    except CodeError as exc:
        print(f"codecraft: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"codecraft: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
