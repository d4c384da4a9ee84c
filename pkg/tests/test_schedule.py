import dataclasses

import pytest

from codecraft.schedule import (
    FrameRule,
    Network,
    Pauli,
    ScheduleError,
    Tableau,
    plan,
    verify_schedule,
)


def test_cnot_schedule_shape():
    s = plan("cnot", Network.chain(3, rounds=4), control=0, target=2, ancilla=1)
    ops = [(st.operation, st.basis, st.operands) for st in s.steps]
    assert ops == [("init", "X", (1,)), ("joint_measure", "Z", (0, 1)),
                   ("joint_measure", "X", (1, 2)), ("single_measure", "Z", (1,))]
    assert all(st.rounds == 4 for st in s.steps[1:])


def test_cnot_oracle_all_paulis():
    s = plan("cnot", Network.chain(3), control=0, target=2, ancilla=1)
    res = verify_schedule(s)
    assert len(res) == 16 and all(ok for _, ok in res)


def test_transfer_oracle_all_paulis():
    s = plan("transfer", Network.chain(2), source=0, target=1)
    assert len(s.steps) == 3
    res = verify_schedule(s)
    assert len(res) == 16 and all(ok for _, ok in res)


def test_oracle_detects_wrong_frame():
    s = plan("cnot", Network.chain(3), control=0, target=2, ancilla=1)
    bad = dataclasses.replace(s, corrections=(FrameRule("Z", 0, ("m2",)),))
    assert not all(ok for _, ok in verify_schedule(bad))
    bad = dataclasses.replace(s, corrections=s.corrections + (FrameRule("X", 0, ("m1",)),))
    assert not all(ok for _, ok in verify_schedule(bad))


def test_measure_schedule():
    s = plan("measure", Network.chain(1), basis="X", qubit=0, rounds=7)
    assert len(s.steps) == 1 and s.steps[0].rounds == 7 and s.steps[0].basis == "X"


def test_missing_code_lists_gap():
    net = Network({("Z", 0, 1): "zz"})
    with pytest.raises(ScheduleError, match="X1X2"):
        plan("cnot", net, control=0, target=2, ancilla=1)


def test_bad_arguments():
    with pytest.raises(ScheduleError):
        plan("cnot", Network.chain(3), control=0, target=0, ancilla=1)
    with pytest.raises(ScheduleError):
        plan("teleport", Network.chain(3))
    with pytest.raises(ScheduleError):
        plan("measure", Network.chain(3), qubit=0, rounds=0)


def test_deterministic_and_network_roundtrip():
    net = Network.chain(3, rounds=3)
    assert Network.from_dict(net.to_dict()) == net
    a = plan("cnot", net, control=0, target=2, ancilla=1).to_dict()
    b = plan("cnot", net, control=0, target=2, ancilla=1).to_dict()
    assert a == b


def test_tableau_basics():
    t = Tableau([Pauli.parse("ZI"), Pauli.parse("IZ")])
    assert t.expectation(Pauli.parse("ZZ")) == 1
    assert t.expectation(Pauli.parse("XI")) == 0
    bit, rnd = t.measure(Pauli.parse("XX"), 1)
    assert rnd and bit == 1
    assert t.expectation(Pauli.parse("XX")) == -1
    assert t.expectation(Pauli.parse("ZZ")) == 1
    y = Pauli.parse("Y")
    assert (y * y).sign() == 1 and str(y) == "+Y"
