"""Interaction-graph partitioning and qubit-to-cavity assignment.

The cavity transpiler needs every multi-qubit term's active qubits spread
over at least two cavities (a term "captured" inside one cavity has no
transmon pair to meet on). This module builds the qubit interaction graph
from a Hamiltonian, partitions qubits into capacity-bounded cavity groups
while maximizing inter-cavity edge weight (a surrogate for minimizing
captured terms), and plans qubit reallocations that free any terms still
captured after partitioning.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from itertools import combinations

from .pauli import Hamiltonian, PauliTerm


@dataclass
class Groupings:
    """Qubit-to-cavity assignment with per-cavity capacities."""

    assignment: list[int]
    capacities: list[int]

    def __post_init__(self) -> None:
        if any(g < 0 or g >= len(self.capacities) for g in self.assignment):
            raise ValueError("assignment references unknown cavity")
        counts = self.counts()
        for g, c in enumerate(counts):
            if c > self.capacities[g]:
                raise ValueError(f"cavity {g} over capacity: {c} > "
                                 f"{self.capacities[g]}")

    @property
    def num_cavities(self) -> int:
        return len(self.capacities)

    def group_of(self, qubit: int) -> int:
        return self.assignment[qubit]

    def members(self, cavity: int) -> list[int]:
        return [q for q, g in enumerate(self.assignment) if g == cavity]

    def counts(self) -> list[int]:
        out = [0] * len(self.capacities)
        for g in self.assignment:
            out[g] += 1
        return out

    def copy(self) -> "Groupings":
        return Groupings(list(self.assignment), list(self.capacities))

    def to_dict(self) -> dict:
        return {"assignment": list(self.assignment),
                "capacities": list(self.capacities)}

    @classmethod
    def from_dict(cls, data: dict) -> "Groupings":
        return cls([int(x) for x in data["assignment"]],
                   [int(x) for x in data["capacities"]])

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path: str) -> "Groupings":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def interaction_graph(h: Hamiltonian) -> dict[tuple[int, int], int]:
    """Weighted interaction graph: consecutive active qubits of each term
    (identity positions skipped) add one to their edge weight."""
    weights: dict[tuple[int, int], int] = {}
    for term in h.terms:
        actives = term.active_qubits()
        for a, b in zip(actives, actives[1:]):
            key = (a, b)
            weights[key] = weights.get(key, 0) + 1
    return weights


def cut_weight(weights: dict[tuple[int, int], int], g: Groupings) -> int:
    return sum(w for (a, b), w in weights.items()
               if g.assignment[a] != g.assignment[b])


def internal_weight(weights: dict[tuple[int, int], int], g: Groupings) -> int:
    return sum(w for (a, b), w in weights.items()
               if g.assignment[a] == g.assignment[b])


def _greedy_seed(weights, num_qubits: int, capacities: list[int]) -> list[int]:
    wdeg = [0.0] * num_qubits
    for (a, b), w in sorted(weights.items()):
        wdeg[a] += w
        wdeg[b] += w
    order = sorted(range(num_qubits), key=lambda q: (-wdeg[q], q))
    assignment = [-1] * num_qubits
    counts = [0] * len(capacities)
    for q in order:
        best = None
        for g in range(len(capacities)):
            if counts[g] >= capacities[g]:
                continue
            internal = sum(w for (a, b), w in weights.items()
                           if (a == q and assignment[b] == g)
                           or (b == q and assignment[a] == g))
            key = (internal, counts[g], g)
            if best is None or key < best[0]:
                best = (key, g)
        if best is None:
            raise ValueError("total capacity below qubit count")
        assignment[q] = best[1]
        counts[best[1]] += 1
    return assignment


def _refine(weights, assignment: list[int], capacities: list[int]) -> list[int]:
    """FM-style hill climbing: best strictly-improving single move or pair
    swap until fixpoint. Deterministic (candidates scanned in sorted order)."""
    n = len(assignment)
    k = len(capacities)
    adj: dict[int, dict[int, float]] = {q: {} for q in range(n)}
    for (a, b), w in weights.items():
        adj[a][b] = adj[a].get(b, 0) + w
        adj[b][a] = adj[b].get(a, 0) + w
    counts = [0] * k
    for g in assignment:
        counts[g] += 1

    def w_to_group(q: int, g: int) -> float:
        return sum(w for nb, w in adj[q].items() if assignment[nb] == g)

    while True:
        best_gain = 0.0
        best_action = None
        for q in range(n):
            g = assignment[q]
            for h in range(k):
                if h == g or counts[h] >= capacities[h]:
                    continue
                gain = w_to_group(q, g) - w_to_group(q, h)
                if gain > best_gain + 1e-12:
                    best_gain, best_action = gain, ("move", q, h)
        for u, v in combinations(range(n), 2):
            gu, gv = assignment[u], assignment[v]
            if gu == gv:
                continue
            gain = (w_to_group(u, gu) + w_to_group(v, gv)
                    - w_to_group(u, gv) - w_to_group(v, gu)
                    + 2 * adj[u].get(v, 0))
            if gain > best_gain + 1e-12:
                best_gain, best_action = gain, ("swap", u, v)
        if best_action is None:
            return assignment
        if best_action[0] == "move":
            _, q, h = best_action
            counts[assignment[q]] -= 1
            assignment[q] = h
            counts[h] += 1
        else:
            _, u, v = best_action
            assignment[u], assignment[v] = assignment[v], assignment[u]


def kway_partition(weights: dict[tuple[int, int], int], num_qubits: int,
                   capacities: list[int], seed: int = 0,
                   restarts: int = 4) -> Groupings:
    """Capacity-constrained k-way partition maximizing inter-cavity weight.

    Greedy weighted seeding refined by FM-style local search; a few seeded
    random restarts guard against shallow local optima. Deterministic for a
    given seed.
    """
    if sum(capacities) < num_qubits:
        raise ValueError("total capacity below qubit count")
    rng = random.Random(seed)
    k = len(capacities)
    best_assign = None
    best_cut = -1.0
    starts = [_greedy_seed(weights, num_qubits, capacities)]
    for _ in range(max(0, restarts - 1)):
        slots = [g for g in range(k) for _ in range(capacities[g])]
        rng.shuffle(slots)
        starts.append(slots[:num_qubits])
    for start in starts:
        refined = _refine(weights, list(start), capacities)
        cut = cut_weight(weights, Groupings(refined, list(capacities)))
        if cut > best_cut:
            best_cut = cut
            best_assign = refined
    return Groupings(best_assign, list(capacities))


def partition_for_topology(h: Hamiltonian, topo, seed: int = 0) -> Groupings:
    if topo.kind != "cavity":
        raise ValueError("partitioning applies to cavity topologies")
    capacities = [topo.modes_per_cavity] * topo.cavities
    return kway_partition(interaction_graph(h), h.num_qubits, capacities,
                          seed=seed)


# ---------------------------------------------------------------------------
# term classification
# ---------------------------------------------------------------------------

@dataclass
class TermSplit:
    """Indices of directly executable terms vs terms captured in one cavity."""

    cross: list[int]
    captured: list[int]


def term_cavities(term: PauliTerm, g: Groupings) -> list[int]:
    """Sorted distinct cavities hosting the term's active qubits."""
    return sorted({g.assignment[q] for q in term.active_qubits()})


def is_captured(term: PauliTerm, g: Groupings) -> bool:
    """True when a multi-qubit term has every active qubit in one cavity."""
    actives = term.active_qubits()
    return len(actives) >= 2 and len({g.assignment[q] for q in actives}) == 1


def split_terms(h: Hamiltonian, g: Groupings,
                pending: list[int] | None = None) -> TermSplit:
    indices = range(len(h.terms)) if pending is None else pending
    cross, captured = [], []
    for i in indices:
        (captured if is_captured(h.terms[i], g) else cross).append(i)
    return TermSplit(cross, captured)


def active_counts(term: PauliTerm, g: Groupings) -> list[int]:
    counts = [0] * g.num_cavities
    for q in term.active_qubits():
        counts[g.assignment[q]] += 1
    return counts


def term_imbalance(term: PauliTerm, g: Groupings) -> int:
    """max-cavity active count minus the sum of the rest (2M - total)."""
    counts = active_counts(term, g)
    m = max(counts)
    return m - (sum(counts) - m)


def majority_cavity(term: PauliTerm, g: Groupings) -> int:
    """Cavity with the most active qubits; ties break to the lower id."""
    counts = active_counts(term, g)
    return counts.index(max(counts))


# ---------------------------------------------------------------------------
# reallocation planning
# ---------------------------------------------------------------------------

@dataclass
class RelocationPlan:
    """Qubit rearrangement freeing captured terms.

    ``exchanges`` are qubit pairs traded between their cavities; ``moves``
    relocate one qubit into a cavity with spare capacity.
    """

    exchanges: list[tuple[int, int]]
    moves: list[tuple[int, int]]

    def apply(self, g: Groupings) -> Groupings:
        out = g.copy()
        for qa, qb in self.exchanges:
            ga, gb = out.assignment[qa], out.assignment[qb]
            out.assignment[qa], out.assignment[qb] = gb, ga
        for q, dest in self.moves:
            out.assignment[q] = dest
        return Groupings(out.assignment, out.capacities)


def plan_reallocation(h: Hamiltonian, g: Groupings,
                      captured: list[int]) -> RelocationPlan:
    """Plan qubit exchanges so at least one captured term becomes cross.

    Every cavity hosting captured terms selects its majority qubit (most
    appearances in that cavity's captured terms, ties to the lowest index).
    Selected cavities are paired by id order and exchange their majority
    qubits; an unpaired cavity moves its qubit to the least-loaded other
    cavity, trading with that cavity's lowest-index qubit when it is full.
    If the exchange plan somehow fails to reduce the captured count, a
    single-qubit move of the globally most frequent captured qubit is used
    instead (unreachable in practice, kept as a guard).
    """
    if not captured:
        return RelocationPlan([], [])
    appearances: dict[int, dict[int, int]] = {}
    for i in captured:
        term = h.terms[i]
        cav = g.assignment[term.active_qubits()[0]]
        per = appearances.setdefault(cav, {})
        for q in term.active_qubits():
            per[q] = per.get(q, 0) + 1
    selected = []
    for cav in sorted(appearances):
        per = appearances[cav]
        q = min(per, key=lambda x: (-per[x], x))
        selected.append((cav, q))

    plan = _pair_plan(selected, g)
    trial = plan.apply(g)
    if len(split_terms(h, trial, captured).captured) < len(captured):
        return plan

    # Fallback guard: move the single most frequent captured qubit.
    total: dict[int, int] = {}
    for per in appearances.values():
        for q, c in per.items():
            total[q] = total.get(q, 0) + c
    q = min(total, key=lambda x: (-total[x], x))
    counts = g.counts()
    others = [c for c in range(g.num_cavities) if c != g.assignment[q]]
    dest = min(others, key=lambda c: (counts[c], c))
    if counts[dest] < g.capacities[dest]:
        return RelocationPlan([], [(q, dest)])
    partner = min(gq for gq in g.members(dest))
    return RelocationPlan([(q, partner)], [])


def _pair_plan(selected: list[tuple[int, int]], g: Groupings) -> RelocationPlan:
    exchanges = []
    moves = []
    for idx in range(0, len(selected) - 1, 2):
        exchanges.append((selected[idx][1], selected[idx + 1][1]))
    if len(selected) % 2 == 1:
        cav, q = selected[-1]
        counts = g.counts()
        others = [c for c in range(g.num_cavities) if c != cav]
        dest = min(others, key=lambda c: (counts[c], c))
        if counts[dest] < g.capacities[dest]:
            moves.append((q, dest))
        else:
            members = g.members(dest)
            exchanges.append((q, members[0]))
    return RelocationPlan(exchanges, moves)
