import pytest

from cavq import topology
from cavq.topology import (build_cavity, build_honeycomb, build_octagonal,
                           cavity_for, honeycomb_for, octagonal_for)


def test_cavity_resource_layout():
    t = build_cavity(2, 4)
    assert t.kind == "cavity"
    assert t.num_resources == 10  # 2 transmons + 8 modes
    assert t.transmons == [0, 1]
    assert t.cavity_modes(0) == [2, 3, 4, 5]
    assert t.cavity_modes(1) == [6, 7, 8, 9]
    assert t.num_qubit_slots == 8


def test_cavity_edge_kinds():
    t = build_cavity(2, 3)
    for mode in t.cavity_modes(0):
        e = (min(0, mode), max(0, mode))
        assert t.edge_kinds[e] == "io"
    assert t.edge_kinds[(0, 1)] == "coupling"
    assert t.is_mode(t.cavity_modes(1)[0])
    assert t.is_transmon(1)


def test_mode_addressing_round_trip():
    t = build_cavity(3, 5)
    for c in range(3):
        for m in range(5):
            r = t.mode_id(c, m)
            assert t.mode_address(r) == (c, m)
            assert t.cavity_of(r) == c
    assert t.transmon_of_cavity(2) == 2


def test_cross_cavity_mode_distance_is_three():
    # mode -> own transmon -> neighbor transmon -> its mode
    t = build_cavity(2, 2)
    a = t.cavity_modes(0)[0]
    b = t.cavity_modes(1)[0]
    assert t.distance(a, b) == 3
    assert t.distance(a, t.cavity_modes(0)[1]) == 2
    assert t.distance(0, 1) == 1


def test_cavity_line_vs_complete_coupling():
    line = build_cavity(3, 1, coupling="line")
    assert (0, 2) not in line.edge_kinds
    comp = build_cavity(3, 1, coupling="complete")
    assert comp.edge_kinds[(0, 2)] == "coupling"


def test_shared_io_bus():
    t = build_cavity(2, 2, shared_io=True)
    mode = t.cavity_modes(0)[0]
    assert t.distance(mode, 1) == 1  # every transmon reaches every mode


def test_honeycomb_degrees_and_kinds():
    t = build_honeycomb(2, 3)
    assert t.kind == "honeycomb"
    degrees = [t.degree(r) for r in range(t.num_resources)]
    assert max(degrees) <= 3  # honeycomb lattice is 3-regular in the bulk
    assert all(k == "coupling" for k in t.edge_kinds.values())
    assert t.transmons == list(range(t.num_resources))


def test_octagonal_degrees():
    t = build_octagonal(2, 2)
    assert t.kind == "octagonal"
    assert t.num_resources == 32  # four 8-cycles
    degrees = [t.degree(r) for r in range(t.num_resources)]
    assert max(degrees) <= 3


def test_distance_and_path_consistency():
    t = build_honeycomb(2, 2)
    n = t.num_resources
    for a in range(0, n, 3):
        for b in range(0, n, 5):
            d = t.distance(a, b)
            assert d == t.distance(b, a)
            path = t.shortest_path_lex(a, b)
            assert len(path) == d + 1
            assert path[0] == a and path[-1] == b
            for u, v in zip(path, path[1:]):
                assert v in t.neighbors(u)


def test_shortest_path_is_lexicographically_smallest():
    t = build_cavity(2, 2, shared_io=True)
    # multiple geodesics exist on the shared bus; expect the lex-least one
    path = t.shortest_path_lex(t.cavity_modes(0)[0], t.cavity_modes(1)[1])
    alt = list(path)
    assert path == min([path, alt])
    assert path[1] in t.transmons


def test_auto_sizing_capacity():
    for n in (6, 14, 22):
        assert cavity_for(n).num_qubit_slots >= n
        assert len(honeycomb_for(n).transmons) >= n
        assert len(octagonal_for(n).transmons) >= n


def test_config_round_trip(tmp_path):
    for t in (build_cavity(2, 3), build_honeycomb(2, 2),
              build_octagonal(1, 2)):
        back = topology.from_config(t.to_config())
        assert back.kind == t.kind
        assert back.num_resources == t.num_resources
        assert sorted(back.edges) == sorted(t.edges)
    p = tmp_path / "t.json"
    build_cavity(2, 5).to_json(str(p))
    assert topology.from_json(str(p)).num_qubit_slots == 10


def test_invalid_builders():
    with pytest.raises(ValueError):
        build_cavity(0, 3)
    with pytest.raises(ValueError):
        build_cavity(2, 2, coupling="star")
    with pytest.raises(ValueError):
        topology.from_config({"kind": "moebius"})
