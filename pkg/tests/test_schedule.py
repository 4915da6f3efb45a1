"""ASAP scheduling and idle-time accounting."""
import random

import pytest

from cavq.partition import Groupings
from cavq.pauli import Hamiltonian, PauliTerm
from cavq.schedule import GateTimes, asap_schedule, idle_report
from cavq.topology import build_cavity, build_honeycomb
from cavq.transpile import (PhysicalCircuit, PhysicalGate,
                            emit_two_qubit_protocol, route_lattice,
                            transpile_cavity)
from cavq.circuits import Gate, LogicalCircuit


def lattice_pc(gates, n=4):
    topo = build_honeycomb(2, 2)
    placement = list(range(n))
    return PhysicalCircuit(topo, n, gates, placement, list(placement))


def test_durations():
    t = GateTimes()
    assert t.duration("cx") == 100
    assert t.duration("h") == 40
    assert t.duration("rz") == 40
    assert t.duration("swap_out") == t.duration("swap_in") == 100
    assert t.duration("swap") == 300
    assert t.duration("measure") == 0
    with pytest.raises(ValueError):
        t.duration("cz")


def test_parallel_singles_share_a_step():
    pc = lattice_pc([PhysicalGate("x", (0,)), PhysicalGate("x", (1,))])
    s = asap_schedule(pc)
    assert s.makespan == 40
    assert [ev.start for ev in s.events] == [0, 0]
    assert s.depth == 1


def test_serial_chain_accumulates():
    pc = lattice_pc([PhysicalGate("x", (0,)), PhysicalGate("cx", (0, 1)),
                     PhysicalGate("x", (1,))])
    s = asap_schedule(pc)
    assert [ev.start for ev in s.events] == [0, 40, 140]
    assert s.makespan == 180
    assert s.depth == 3


def test_protocol_is_three_hundred_ns():
    topo = build_cavity(2, 2)
    pc = emit_two_qubit_protocol(topo, Groupings([0, 1], [2, 2]), 0, 1)
    s = asap_schedule(pc)
    assert s.makespan == 300
    assert s.depth == 3
    starts = [ev.start for ev in s.events]
    assert starts == [0, 0, 100, 200, 200]


def test_measure_pins_to_makespan():
    pc = lattice_pc([PhysicalGate("measure", (0,)), PhysicalGate("x", (0,)),
                     PhysicalGate("cx", (0, 1))])
    s = asap_schedule(pc)
    meas = [ev for ev in s.events if ev.gate.kind == "measure"]
    assert len(meas) == 1
    assert meas[0].start == s.makespan == 140
    assert meas[0].duration == 0


def test_custom_times():
    pc = lattice_pc([PhysicalGate("cx", (0, 1))])
    s = asap_schedule(pc, GateTimes(cx=250))
    assert s.makespan == 250


def test_events_sorted_and_exclusive():
    rng = random.Random(4)
    terms = []
    for _ in range(8):
        p = ["I"] * 5
        for q in rng.sample(range(5), rng.choice([2, 3])):
            p[q] = rng.choice("XYZ")
        terms.append(PauliTerm("".join(p), 1.0))
    pc = transpile_cavity(Hamiltonian(5, terms), build_cavity(2, 3),
                          thetas=[0.1] * 8)
    s = asap_schedule(pc)
    keys = [(ev.start) for ev in s.events]
    assert keys == sorted(keys)
    by_resource = {}
    for ev in s.events:
        for r in ev.gate.resources:
            by_resource.setdefault(r, []).append((ev.start, ev.end))
    for spans in by_resource.values():
        spans.sort()
        for (s0, e0), (s1, _) in zip(spans, spans[1:]):
            assert s1 >= e0  # no overlap on any resource


def test_idle_report_accounting():
    pc = route_lattice(LogicalCircuit(3, [Gate("h", (0,)), Gate("cx", (0, 1)),
                                          Gate("cx", (1, 2))]),
                       build_honeycomb(2, 2))
    s = asap_schedule(pc)
    rep = idle_report(s)
    first = {}
    for ev in s.events:
        for r in ev.gate.resources:
            first.setdefault(r, ev.start)
    assert set(rep.busy) == set(first)
    for r in rep.busy:
        assert rep.busy[r] + rep.idle[r] == s.makespan - first[r]
        assert rep.idle[r] >= 0
    d = rep.to_dict()
    assert set(d) == {"busy", "idle"}


def test_schedule_serialization(tmp_path):
    topo = build_cavity(2, 2)
    pc = emit_two_qubit_protocol(topo, Groupings([0, 1], [2, 2]), 0, 1)
    s = asap_schedule(pc)
    d = s.to_dict()
    assert d["makespan"] == 300 and d["depth"] == 3
    assert len(d["events"]) == 5
    assert all({"op", "resources", "start", "duration"} <= set(e)
               for e in d["events"])
    path = tmp_path / "sched.json"
    s.to_json(str(path))
    import json
    assert json.loads(path.read_text()) == d
