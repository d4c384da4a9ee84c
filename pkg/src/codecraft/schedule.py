"""Logical-level schedules built from joint Pauli measurements.

A CNOT uses an ancilla logical qubit prepared in |+>, a ZZ measurement
with the control, an XX measurement with the target and a final Z readout
of the ancilla. A state transfer uses a ZZ measurement followed by an X
readout of the source. Byproduct Paulis are tracked as frame rules: each
rule applies a Pauli when the parity of a set of outcome bits is odd.

``Tableau`` is a tiny stabilizer simulator used to check the schedules.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .bb import CodeError

__all__ = [
    "ScheduleError",
    "Step",
    "FrameRule",
    "Schedule",
    "Network",
    "plan",
    "Pauli",
    "Tableau",
    "simulate",
    "verify_schedule",
]


class ScheduleError(CodeError):
    pass


@dataclass(frozen=True)
class Step:
    operation: str  # joint_measure | single_measure | init | pauli_frame
    operands: tuple
    basis: str
    rounds: int = 1
    outcome: str | None = None

    def to_dict(self) -> dict:
        d = {"operation": self.operation, "operands": list(self.operands), "basis": self.basis, "rounds": self.rounds}
        if self.outcome is not None:
            d["outcome"] = self.outcome
        return d


@dataclass(frozen=True)
class FrameRule:
    """Apply ``pauli`` on ``qubit`` iff the XOR of ``outcomes`` is 1."""

    pauli: str
    qubit: int
    outcomes: tuple

    def to_dict(self) -> dict:
        return {"pauli": self.pauli, "qubit": self.qubit, "if_parity": list(self.outcomes)}


@dataclass(frozen=True)
class Schedule:
    kind: str
    steps: tuple
    corrections: tuple
    qubits: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "qubits": dict(self.qubits),
            "steps": [s.to_dict() for s in self.steps],
            "corrections": [c.to_dict() for c in self.corrections],
        }


@dataclass(frozen=True)
class Network:
    """Which joint measurements have a deformed code available.

    ``joint`` maps ``(basis, a, b)`` with ``a < b`` to a label of the
    deformed code; ``single`` does the same for ``(basis, a)``. When
    ``single`` is None, every single-qubit measurement is assumed available.
    """

    joint: dict
    single: dict | None = None
    rounds: int = 1

    @classmethod
    def from_dict(cls, d: dict) -> "Network":
        try:
            joint = {}
            for e in d.get("joint", []):
                a, b = e["operands"]
                joint[(e["basis"], min(a, b), max(a, b))] = e.get("code", f"{e['basis']}{a}{e['basis']}{b}")
            single = None
            if "single" in d:
                single = {(e["basis"], e["operands"][0]): e.get("code", "") for e in d["single"]}
            return cls(joint, single, int(d.get("rounds", 1)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ScheduleError(f"malformed network: {exc}") from exc

    def to_dict(self) -> dict:
        d = {
            "rounds": self.rounds,
            "joint": [{"basis": b, "operands": [x, y], "code": c} for (b, x, y), c in sorted(self.joint.items())],
        }
        if self.single is not None:
            d["single"] = [{"basis": b, "operands": [x], "code": c} for (b, x), c in sorted(self.single.items())]
        return d

    @classmethod
    def chain(cls, nq: int, rounds: int = 1) -> "Network":
        """Neighbouring blocks joined by both ZZ and XX codes."""
        joint = {}
        for i in range(nq - 1):
            for b in "XZ":
                joint[(b, i, i + 1)] = f"{b}{i}{b}{i + 1}"
        return cls(joint, None, rounds)


def _need(net: Network, missing: list, basis: str, *qs):
    if len(qs) == 2:
        key = (basis, min(qs), max(qs))
        if key not in net.joint:
            missing.append(f"{basis}{qs[0]}{basis}{qs[1]}")
    elif net.single is not None and (basis, qs[0]) not in net.single:
        missing.append(f"{basis}{qs[0]}")


def plan(kind: str, net: Network, *, control: int | None = None, target: int | None = None,
         ancilla: int | None = None, source: int | None = None, basis: str = "X",
         qubit: int | None = None, rounds: int | None = None) -> Schedule:
    r = net.rounds if rounds is None else rounds
    if r < 1:
        raise ScheduleError("rounds must be >= 1")
    missing: list[str] = []
    if kind == "cnot":
        c, t, a = control, target, ancilla
        if None in (c, t, a) or len({c, t, a}) != 3:
            raise ScheduleError("cnot needs distinct control, target and ancilla")
        _need(net, missing, "Z", c, a)
        _need(net, missing, "X", a, t)
        _need(net, missing, "Z", a)
        steps = (
            Step("init", (a,), "X", 1),
            Step("joint_measure", (c, a), "Z", r, "m1"),
            Step("joint_measure", (a, t), "X", r, "m2"),
            Step("single_measure", (a,), "Z", r, "m3"),
        )
        frame = (FrameRule("Z", c, ("m2",)), FrameRule("X", t, ("m1", "m3")))
        qubits = {"control": c, "target": t, "ancilla": a}
    elif kind == "transfer":
        s, t = source, target
        if None in (s, t) or s == t:
            raise ScheduleError("transfer needs distinct source and target")
        _need(net, missing, "Z", s, t)
        _need(net, missing, "X", s)
        steps = (
            Step("init", (t,), "X", 1),
            Step("joint_measure", (s, t), "Z", r, "m1"),
            Step("single_measure", (s,), "X", r, "m2"),
        )
        frame = (FrameRule("X", t, ("m1",)), FrameRule("Z", t, ("m2",)))
        qubits = {"source": s, "target": t}
    elif kind == "measure":
        if qubit is None or basis not in ("X", "Z"):
            raise ScheduleError("measure needs a qubit and basis X or Z")
        _need(net, missing, basis, qubit)
        steps = (Step("single_measure", (qubit,), basis, r, "m1"),)
        frame = ()
        qubits = {"qubit": qubit}
    else:
        raise ScheduleError(f"unknown schedule kind {kind!r}")
    if missing:
        raise ScheduleError("no deformed code available for: " + ", ".join(missing))
    return Schedule(kind, steps, frame, qubits)


# ---------------------------------------------------------------- simulator

@dataclass(frozen=True)
class Pauli:
    """``i^phase * X^x Z^z`` on ``n`` qubits, bits packed in ints."""

    n: int
    x: int
    z: int
    phase: int = 0

    @classmethod
    def parse(cls, s: str) -> "Pauli":
        sign = 0
        if s[0] in "+-":
            sign = 2 if s[0] == "-" else 0
            s = s[1:]
        x = z = 0
        ph = sign
        for i, ch in enumerate(s):
            if ch in "XY":
                x |= 1 << i
            if ch in "ZY":
                z |= 1 << i
            if ch == "Y":
                ph += 1  # Y = i X Z
            elif ch not in "XZI":
                raise ScheduleError(f"bad Pauli letter {ch!r}")
        return cls(len(s), x, z, ph % 4)

    @classmethod
    def single(cls, n: int, q: int, letter: str) -> "Pauli":
        return cls.parse("I" * q + letter + "I" * (n - q - 1))

    def __mul__(self, o: "Pauli") -> "Pauli":
        # X^a Z^b X^c Z^d = (-1)^{b.c} X^{a+c} Z^{b+d}
        ph = self.phase + o.phase + 2 * ((self.z & o.x).bit_count() & 1)
        return Pauli(self.n, self.x ^ o.x, self.z ^ o.z, ph % 4)

    def commutes(self, o: "Pauli") -> bool:
        return ((self.x & o.z).bit_count() + (self.z & o.x).bit_count()) % 2 == 0

    def sign(self) -> int:
        """+1 or -1 for Hermitian Paulis."""
        ph = (self.phase - (self.x & self.z).bit_count()) % 4
        if ph % 2:
            raise ScheduleError("non-Hermitian Pauli")
        return 1 if ph == 0 else -1

    def neg(self) -> "Pauli":
        return Pauli(self.n, self.x, self.z, (self.phase + 2) % 4)

    def unsigned(self) -> "Pauli":
        return Pauli(self.n, self.x, self.z, (self.x & self.z).bit_count() % 4)

    def __str__(self):
        out = []
        for i in range(self.n):
            xb, zb = self.x >> i & 1, self.z >> i & 1
            out.append("IXZY"[xb + 2 * zb])
        return ("+" if self.sign() > 0 else "-") + "".join(out)


class Tableau:
    """Stabilizer state as a list of ``n`` independent commuting generators."""

    def __init__(self, gens):
        self.gens = list(gens)
        self.n = self.gens[0].n

    def _express(self, p: Pauli):
        """Product of generators equal to ``p`` up to sign, or None."""
        for mask in range(1 << len(self.gens)):
            acc = Pauli(self.n, 0, 0, 0)
            for i, g in enumerate(self.gens):
                if mask >> i & 1:
                    acc = acc * g
            if acc.x == p.x and acc.z == p.z:
                return acc
        return None

    def expectation(self, p: Pauli) -> int:
        """+1/-1 if ``p`` or ``-p`` stabilizes the state, else 0."""
        if not all(p.commutes(g) for g in self.gens):
            return 0
        acc = self._express(p)
        if acc is None:
            return 0
        return acc.sign() * p.sign()

    def measure(self, p: Pauli, outcome: int | None = None) -> tuple[int, bool]:
        """Measure ``p``; returns ``(bit, random)``. ``outcome`` forces the bit
        of a random measurement."""
        anti = [i for i, g in enumerate(self.gens) if not p.commutes(g)]
        if not anti:
            e = self.expectation(p)
            return (0 if e > 0 else 1), False
        piv = anti[0]
        for i in anti[1:]:
            self.gens[i] = self.gens[i] * self.gens[piv]
        bit = 0 if outcome is None else outcome
        self.gens[piv] = p.neg() if bit else p
        return bit, True

    def apply_pauli(self, p: Pauli) -> None:
        self.gens = [g if g.commutes(p) else g.neg() for g in self.gens]

    def reset_plus(self, q: int) -> None:
        """Measure X on ``q`` and fix it to +1."""
        bit, _ = self.measure(Pauli.single(self.n, q, "X"), 0)
        if bit:
            self.apply_pauli(Pauli.single(self.n, q, "Z"))


def _cnot_conj(p: Pauli, c: int, t: int) -> Pauli:
    """CNOT p CNOT with control ``c`` and target ``t``."""
    n = p.n
    img = {}
    for q in range(n):
        img["X", q] = Pauli.single(n, q, "X")
        img["Z", q] = Pauli.single(n, q, "Z")
    img["X", c] = img["X", c] * Pauli.single(n, t, "X")
    img["Z", t] = Pauli.single(n, c, "Z") * img["Z", t]
    out = Pauli(n, 0, 0, p.phase)
    for q in range(n):
        if p.x >> q & 1:
            out = out * img["X", q]
    for q in range(n):
        if p.z >> q & 1:
            out = out * img["Z", q]
    return out


def simulate(sched: Schedule, tab: Tableau, outcomes: dict) -> dict:
    """Run ``sched`` on ``tab`` forcing random outcomes from ``outcomes``;
    returns the recorded outcome bits."""
    rec = {}
    n = tab.n
    for st in sched.steps:
        if st.operation == "init":
            for q in st.operands:
                if st.basis == "X":
                    tab.reset_plus(q)
                else:
                    bit, _ = tab.measure(Pauli.single(n, q, "Z"), 0)
                    if bit:
                        tab.apply_pauli(Pauli.single(n, q, "X"))
        elif st.operation in ("joint_measure", "single_measure"):
            x = z = 0
            for q in st.operands:
                if st.basis == "X":
                    x |= 1 << q
                else:
                    z |= 1 << q
            bit, _ = tab.measure(Pauli(n, x, z, 0), outcomes.get(st.outcome, 0))
            rec[st.outcome] = bit
    for rule in sched.corrections:
        if sum(rec[o] for o in rule.outcomes) % 2:
            tab.apply_pauli(Pauli.single(n, rule.qubit, rule.pauli))
    return rec


def _embed(p: Pauli, where: list, n: int) -> Pauli:
    x = z = 0
    for i, q in enumerate(where):
        x |= (p.x >> i & 1) << q
        z |= (p.z >> i & 1) << q
    return Pauli(n, x, z, 0).unsigned() if p.sign() > 0 else Pauli(n, x, z, 0).unsigned().neg()


def _two_qubit_paulis():
    return [Pauli.parse(a + b) for a, b in itertools.product("IXYZ", repeat=2)]


def verify_schedule(sched: Schedule) -> list[tuple[str, bool]]:
    """Check the logical action on all 16 two-qubit Pauli inputs.

    For each input Pauli ``P`` (and each sign) an input state stabilized by
    ``P`` is run through every outcome branch; the output must be stabilized
    by the ideal image of ``P``. CNOT is checked on (control, target) with
    an ancilla; transfer on (source, spectator) -> (target, spectator).
    Returns ``(label, ok)`` for every input.
    """
    n = 3
    if sched.kind == "cnot":
        c, t, a = sched.qubits["control"], sched.qubits["target"], sched.qubits["ancilla"]
        remap = {c: 0, t: 1, a: 2}
        ins = [0, 1]
    elif sched.kind == "transfer":
        s, t = sched.qubits["source"], sched.qubits["target"]
        remap = {s: 0, t: 1}
        ins = [0, 2]
    else:
        raise ScheduleError("only cnot and transfer schedules have a logical action to verify")
    local = _relabel(sched, remap)

    def ideal(p: Pauli) -> Pauli:
        if sched.kind == "cnot":
            return _cnot_conj(_embed(p, [0, 1], n), 0, 1)
        return _embed(p, [1, 2], n)  # source moved to qubit 1

    results = []
    for p in _two_qubit_paulis():
        label = str(p)[1:]
        ok = True
        if p.x == 0 and p.z == 0:
            results.append((label, True))
            continue
        for sgn in (1, -1):
            pin = p if sgn > 0 else p.neg()
            want = ideal(pin)
            for branch in itertools.product((0, 1), repeat=3):
                tab = Tableau(_input_state(_embed(pin, ins, n), ins, n))
                simulate(local, tab, dict(zip(("m1", "m2", "m3"), branch)))
                if tab.expectation(want) != 1:
                    ok = False
        results.append((label, ok))
    return results


def _relabel(sched: Schedule, remap: dict) -> Schedule:
    steps = tuple(Step(s.operation, tuple(remap[q] for q in s.operands), s.basis, s.rounds, s.outcome)
                  for s in sched.steps)
    corr = tuple(FrameRule(c.pauli, remap[c.qubit], c.outcomes) for c in sched.corrections)
    return Schedule(sched.kind, steps, corr, {k: remap.get(v, v) for k, v in sched.qubits.items()})


def _input_state(p: Pauli, ins: list, n: int) -> list:
    """Generators: ``p``, one more commuting Pauli on the input pair, and Z
    on the remaining qubit."""
    gens = [p]
    for q in _two_qubit_paulis():
        g = _embed(q, ins, n)
        if (g.x or g.z) and g.commutes(p) and (g.x, g.z) != (p.x, p.z):
            gens.append(g)
            break
    rest = [q for q in range(n) if q not in ins]
    gens += [Pauli.single(n, q, "Z") for q in rest]
    return gens
