"""Qubit-to-cavity partitioning and reallocation planning."""
import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cavq.partition import (Groupings, RelocationPlan, cut_weight,
                            interaction_graph, internal_weight, is_captured,
                            kway_partition, majority_cavity,
                            partition_for_topology, plan_reallocation,
                            split_terms, term_cavities, term_imbalance)
from cavq.pauli import Hamiltonian, PauliTerm
from cavq.topology import build_cavity


def random_hamiltonian(n, t, seed):
    rng = random.Random(seed)
    terms = []
    for _ in range(t):
        w = rng.choice([2, 3, 4])
        qs = sorted(rng.sample(range(n), min(w, n)))
        p = ["I"] * n
        for q in qs:
            p[q] = rng.choice("XYZ")
        terms.append(PauliTerm("".join(p), 1.0))
    return Hamiltonian(n, terms)


def brute_force_best_cut(weights, n, caps):
    best = -1
    k = len(caps)
    for assign in itertools.product(range(k), repeat=n):
        counts = [0] * k
        for g in assign:
            counts[g] += 1
        if any(c > cap for c, cap in zip(counts, caps)):
            continue
        best = max(best, cut_weight(weights, Groupings(list(assign), list(caps))))
    return best


# ---------------------------------------------------------------------------
# Groupings container
# ---------------------------------------------------------------------------

def test_groupings_rejects_over_capacity():
    with pytest.raises(ValueError):
        Groupings([0, 0, 0], [2, 1])


def test_groupings_rejects_unknown_cavity():
    with pytest.raises(ValueError):
        Groupings([0, 2], [2, 2])


def test_groupings_accessors():
    g = Groupings([0, 1, 0, 1], [2, 2])
    assert g.num_cavities == 2
    assert g.group_of(2) == 0
    assert g.members(1) == [1, 3]
    assert g.counts() == [2, 2]
    assert Groupings.from_dict(g.to_dict()) == g


def test_groupings_copy_is_independent():
    g = Groupings([0, 1], [1, 1])
    h = g.copy()
    h.assignment[0] = 1
    assert g.assignment == [0, 1]


# ---------------------------------------------------------------------------
# interaction graph
# ---------------------------------------------------------------------------

def test_interaction_graph_consecutive_actives():
    # XIZY has actives [0, 2, 3]: edges (0,2) and (2,3)
    h = Hamiltonian(4, [PauliTerm("XIZY", 1.0), PauliTerm("ZZII", 1.0),
                        PauliTerm("IIZZ", 1.0)])
    w = interaction_graph(h)
    assert w == {(0, 2): 1, (2, 3): 2, (0, 1): 1}


def test_cut_plus_internal_is_total():
    h = random_hamiltonian(6, 9, seed=3)
    w = interaction_graph(h)
    g = Groupings([0, 1, 0, 1, 0, 1], [3, 3])
    assert cut_weight(w, g) + internal_weight(w, g) == sum(w.values())


# ---------------------------------------------------------------------------
# k-way partition vs exhaustive search
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("seed", range(8))
def test_bipartition_matches_brute_force(seed):
    n = 6 + (seed % 3)
    h = random_hamiltonian(n, 8 + seed, seed)
    w = interaction_graph(h)
    caps = [(n + 1) // 2, (n + 1) // 2]
    g = kway_partition(w, n, caps, seed=0)
    assert g.counts() == [sum(1 for a in g.assignment if a == c)
                          for c in range(2)]
    assert cut_weight(w, g) == brute_force_best_cut(w, n, caps)


def test_three_way_respects_capacity():
    h = random_hamiltonian(9, 14, seed=5)
    w = interaction_graph(h)
    g = kway_partition(w, 9, [3, 3, 3], seed=1)
    assert g.counts() == [3, 3, 3]
    assert cut_weight(w, g) == brute_force_best_cut(w, 9, [3, 3, 3])


def test_partition_insufficient_capacity():
    with pytest.raises(ValueError):
        kway_partition({}, 5, [2, 2])


def test_partition_for_topology_uses_cavity_shape():
    topo = build_cavity(2, 3)
    h = random_hamiltonian(6, 8, seed=0)
    g = partition_for_topology(h, topo, seed=0)
    assert g.num_cavities == 2
    assert g.capacities == [3, 3]
    assert sorted(g.assignment) != []  # all six qubits placed
    assert len(g.assignment) == 6


def test_partition_deterministic():
    h = random_hamiltonian(8, 12, seed=7)
    w = interaction_graph(h)
    a = kway_partition(w, 8, [4, 4], seed=3)
    b = kway_partition(w, 8, [4, 4], seed=3)
    assert a.assignment == b.assignment


# ---------------------------------------------------------------------------
# term classification
# ---------------------------------------------------------------------------

def test_term_classification():
    g = Groupings([0, 0, 1, 1], [2, 2])
    inside = PauliTerm("ZZII", 1.0)
    across = PauliTerm("ZIZI", 1.0)
    single = PauliTerm("IIXI", 1.0)
    assert is_captured(inside, g)
    assert not is_captured(across, g)
    assert not is_captured(single, g)  # weight-1 terms never need routing
    assert term_cavities(across, g) == [0, 1]
    assert term_cavities(single, g) == [1]


def test_split_terms_partitions_indices():
    h = Hamiltonian(4, [PauliTerm("ZZII", 1.0), PauliTerm("ZIZI", 1.0),
                        PauliTerm("IIZZ", 1.0)])
    g = Groupings([0, 0, 1, 1], [2, 2])
    s = split_terms(h, g)
    assert sorted(s.cross + s.captured) == [0, 1, 2]
    assert s.captured == [0, 2]
    assert s.cross == [1]
    # restricted to a pending subset
    s2 = split_terms(h, g, pending=[1, 2])
    assert s2.captured == [2]
    assert s2.cross == [1]


def test_majority_cavity_tie_breaks_low():
    g = Groupings([0, 0, 1, 1], [2, 2])
    t = PauliTerm("ZZXX", 1.0)  # two actives in each cavity
    assert majority_cavity(t, g) == 0
    assert term_imbalance(t, g) == 0
    lop = PauliTerm("ZZXI", 1.0)
    assert majority_cavity(lop, g) == 0
    assert term_imbalance(lop, g) == 1


# ---------------------------------------------------------------------------
# reallocation planning
# ---------------------------------------------------------------------------

def test_relocation_plan_apply():
    g = Groupings([0, 0, 1, 1], [2, 2])
    plan = RelocationPlan(exchanges=[(1, 2)], moves=[])
    moved = plan.apply(g)
    assert moved.assignment == [0, 1, 0, 1]
    assert g.assignment == [0, 0, 1, 1]  # original untouched


def test_plan_reallocation_empty_is_noop():
    h = Hamiltonian(2, [PauliTerm("ZZ", 1.0)])
    g = Groupings([0, 1], [1, 1])
    plan = plan_reallocation(h, g, [])
    assert plan.exchanges == [] and plan.moves == []


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_plan_strictly_reduces_captured_set(seed):
    rng = random.Random(seed)
    n = rng.randrange(4, 9)
    h = random_hamiltonian(n, rng.randrange(3, 12), seed)
    caps = [(n + 1) // 2] * 2
    g = kway_partition(interaction_graph(h), n, caps, seed=seed)
    captured = split_terms(h, g).captured
    if not captured:
        return
    plan = plan_reallocation(h, g, captured)
    after = plan.apply(g)
    remaining = split_terms(h, after, pending=captured).captured
    assert len(remaining) < len(captured)
    assert after.counts() == [sum(1 for a in after.assignment if a == c)
                              for c in range(2)]


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10_000))
def test_singleton_plan_frees_that_term(seed):
    # planning for one captured term must free exactly that term in one step
    rng = random.Random(seed)
    n = rng.randrange(4, 10)
    h = random_hamiltonian(n, rng.randrange(3, 12), seed)
    k = rng.choice([2, 3])
    caps = [-(-n // k)] * k
    g = kway_partition(interaction_graph(h), n, caps, seed=seed)
    captured = split_terms(h, g).captured
    for i in captured:
        plan = plan_reallocation(h, g, [i])
        after = plan.apply(g)
        assert not is_captured(h.terms[i], after)
