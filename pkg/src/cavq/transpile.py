"""Transpilers: cavity-centric staging and lattice SWAP routing.

Physical gates address topology resources. On cavity devices logical qubits
rest in cavity modes and must be staged onto the (single) transmon of their
cavity for any gate; two-qubit gates execute between transmons of different
cavities. On lattices qubits live on transmons and non-adjacent two-qubit
gates are routed with SWAP chains.

Gate kinds and operand order:

========== ======================= =====================================
kind       resources               meaning
========== ======================= =====================================
swap_out   (mode, transmon)        fetch a qubit out of a cavity mode
swap_in    (transmon, mode)        store a qubit back into a cavity mode
cx         (control, target)       CX between two coupled transmons
swap       (a, b)                  SWAP between two coupled transmons
rz/sx/x/.. (transmon,)             single-qubit gate (flat 40 ns pricing)
measure    (resource,)             terminal readout marker
========== ======================= =====================================

Every gate carries an ``overhead`` flag set at emission time: True for
movement bookkeeping (I/O swaps, routing SWAPs, reallocation CX), False for
payload gates the logical circuit requires.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .circuits import LogicalCircuit
from .partition import (Groupings, active_counts, majority_cavity,
                        partition_for_topology, plan_reallocation,
                        term_imbalance)
from .pauli import Hamiltonian, PauliTerm
from .topology import Topology

ONE_QUBIT_PHYS = {"h", "x", "sx", "id", "rz", "rx", "ry"}


@dataclass(frozen=True)
class PhysicalGate:
    kind: str
    resources: tuple[int, ...]
    angle: float | None = None
    param: tuple[int, float] | None = None
    overhead: bool = False

    def bound_angle(self, params=None) -> float | None:
        if self.param is not None:
            slot, mult = self.param
            return mult * params[slot]
        return self.angle


@dataclass
class PhysicalCircuit:
    topology: Topology
    num_qubits: int
    gates: list[PhysicalGate]
    initial_placement: list[int]
    final_placement: list[int]

    def bind(self, params) -> "PhysicalCircuit":
        gates = [replace(g, angle=g.bound_angle(params), param=None)
                 if g.param is not None else g for g in self.gates]
        return PhysicalCircuit(self.topology, self.num_qubits, gates,
                               list(self.initial_placement),
                               list(self.final_placement))

    def num_params(self) -> int:
        slots = {g.param[0] for g in self.gates if g.param is not None}
        return 1 + max(slots) if slots else 0

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        gates = []
        for g in self.gates:
            if g.param is not None:
                raise ValueError("bind parameters before serializing")
            if g.kind == "swap_out":
                mode, t = g.resources
                d = {"op": "swap_out",
                     "mode": list(self.topology.mode_address(mode)),
                     "transmon": t}
            elif g.kind == "swap_in":
                t, mode = g.resources
                d = {"op": "swap_in", "transmon": t,
                     "mode": list(self.topology.mode_address(mode))}
            elif g.kind in ("cx", "swap"):
                d = {"op": g.kind, "t": list(g.resources)}
            else:
                d = {"op": g.kind, "t": g.resources[0]}
                if g.angle is not None:
                    d["angle"] = g.angle
            if g.overhead:
                d["routing"] = True
            gates.append(d)
        return {
            "topology": self.topology.to_config(),
            "num_qubits": self.num_qubits,
            "initial_placement": list(self.initial_placement),
            "final_placement": list(self.final_placement),
            "gates": gates,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PhysicalCircuit":
        from . import topology as topo_mod
        topo = topo_mod.from_config(data["topology"])
        gates = []
        for d in data["gates"]:
            op = d["op"]
            overhead = bool(d.get("routing", False))
            if op == "swap_out":
                mode = topo.mode_id(*d["mode"])
                g = PhysicalGate("swap_out", (mode, int(d["transmon"])),
                                 overhead=overhead)
            elif op == "swap_in":
                mode = topo.mode_id(*d["mode"])
                g = PhysicalGate("swap_in", (int(d["transmon"]), mode),
                                 overhead=overhead)
            elif op in ("cx", "swap"):
                g = PhysicalGate(op, tuple(int(x) for x in d["t"]),
                                 overhead=overhead)
            else:
                g = PhysicalGate(op, (int(d["t"]),),
                                 angle=d.get("angle"), overhead=overhead)
            gates.append(g)
        return cls(topo, int(data["num_qubits"]), gates,
                   [int(x) for x in data["initial_placement"]],
                   [int(x) for x in data["final_placement"]])

    def to_json(self, path: str) -> None:
        import json
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path: str) -> "PhysicalCircuit":
        import json
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def replay_operations(pc: PhysicalCircuit,
                      strict: bool = True) -> tuple[list, list[int]]:
    """Walk the gate list tracking which logical qubit each resource holds.

    Returns ``(ops, final_placement)`` where ops pairs each gate with the
    logical qubits bound to its resources at that point (None for an empty
    resource). With ``strict`` the walk asserts occupancy and coupling
    invariants, so it doubles as the circuit validator.
    """
    topo = pc.topology
    holder: dict[int, int | None] = {r: None for r in range(topo.num_resources)}
    for q, r in enumerate(pc.initial_placement):
        if strict and holder[r] is not None:
            raise ValueError(f"two qubits placed on resource {r}")
        holder[r] = q

    def edge_kind(a: int, b: int) -> str:
        return topo.edge_kinds.get((min(a, b), max(a, b)), "missing")

    ops = []
    for g in pc.gates:
        if g.kind == "swap_out":
            mode, t = g.resources
            if strict:
                if holder[mode] is None:
                    raise ValueError(f"swap_out from empty mode {mode}")
                if holder[t] is not None:
                    raise ValueError(f"swap_out onto occupied transmon {t}")
                if edge_kind(mode, t) != "io":
                    raise ValueError(f"no io edge between {mode} and {t}")
            ops.append((g, (holder[mode],)))
            holder[t], holder[mode] = holder[mode], None
        elif g.kind == "swap_in":
            t, mode = g.resources
            if strict:
                if holder[t] is None:
                    raise ValueError(f"swap_in from empty transmon {t}")
                if holder[mode] is not None:
                    raise ValueError(f"swap_in onto occupied mode {mode}")
                if edge_kind(mode, t) != "io":
                    raise ValueError(f"no io edge between {mode} and {t}")
            ops.append((g, (holder[t],)))
            holder[mode], holder[t] = holder[t], None
        elif g.kind == "swap":
            a, b = g.resources
            if strict:
                if edge_kind(a, b) != "coupling":
                    raise ValueError(f"no coupling edge between {a} and {b}")
                if g.overhead and holder[a] is None and holder[b] is None:
                    raise ValueError("swap between two empty resources")
                if not g.overhead and (holder[a] is None or holder[b] is None):
                    raise ValueError("payload swap needs two occupied sites")
            ops.append((g, (holder[a], holder[b])))
            # overhead swaps relocate (the emitter updated its placement map);
            # payload swaps exchange logical states in place
            if g.overhead:
                holder[a], holder[b] = holder[b], holder[a]
        elif g.kind == "cx":
            a, b = g.resources
            if strict:
                if edge_kind(a, b) != "coupling":
                    raise ValueError(f"no coupling edge between {a} and {b}")
                if holder[a] is None or holder[b] is None:
                    raise ValueError(f"cx needs two occupied transmons, "
                                     f"got {a}={holder[a]} {b}={holder[b]}")
            ops.append((g, (holder[a], holder[b])))
        elif g.kind in ONE_QUBIT_PHYS or g.kind == "measure":
            r = g.resources[0]
            if strict:
                if holder[r] is None:
                    raise ValueError(f"{g.kind} on empty resource {r}")
                if topo.kind == "cavity" and topo.is_mode(r) \
                        and g.kind != "measure":
                    raise ValueError("single-qubit gate on a cavity mode")
            ops.append((g, (holder[r],)))
        else:
            raise ValueError(f"unknown physical gate kind {g.kind!r}")
    final = [-1] * pc.num_qubits
    for r, q in holder.items():
        if q is not None:
            final[q] = r
    return ops, final


def alignment_permutation(pc: PhysicalCircuit,
                          replay_final: list[int]) -> list[int]:
    """Map replayed labels to the wires of the recorded final placement.

    A relocation spelled as explicit CXs (the reallocation exchange triple,
    or a lowered SWAP) moves a state without moving the replay's label; the
    emitter's ``final_placement`` is the authoritative wire-to-resource map.
    Returns p with p[label] = wire; identity when no CX-spelled relocation
    occurred. Raises if the two occupancy views cannot be reconciled.
    """
    res_to_wire = {r: w for w, r in enumerate(pc.final_placement)}
    p = [res_to_wire.get(r, -1) for r in replay_final]
    if sorted(p) != list(range(pc.num_qubits)):
        raise ValueError("final_placement does not match replayed occupancy")
    return p


def validate_physical(pc: PhysicalCircuit) -> list[int]:
    """Replay with invariant checks; returns the label-to-wire alignment."""
    _, final = replay_operations(pc, strict=True)
    return alignment_permutation(pc, final)


# ---------------------------------------------------------------------------
# metrics
# ---------------------------------------------------------------------------

@dataclass
class RoutingMetrics:
    cx_count: int
    one_qubit_count: int
    swap_io_count: int
    swap_route_count: int
    depth: int
    total_gates: int
    routing_overhead: int

    def to_dict(self) -> dict:
        return {
            "cx": self.cx_count,
            "one_qubit": self.one_qubit_count,
            "swap_io": self.swap_io_count,
            "swap_route": self.swap_route_count,
            "depth": self.depth,
            "total_gates": self.total_gates,
            "routing_overhead": self.routing_overhead,
        }


def circuit_depth(pc: PhysicalCircuit) -> int:
    """ASAP depth in unit steps (each gate occupies one layer)."""
    ready: dict[int, int] = {}
    depth = 0
    for g in pc.gates:
        layer = 1 + max((ready.get(r, 0) for r in g.resources), default=0)
        for r in g.resources:
            ready[r] = layer
        depth = max(depth, layer)
    return depth


def count_metrics(pc: PhysicalCircuit) -> RoutingMetrics:
    """Gate counts, unit-step depth and appended-gate overhead.

    ``routing_overhead`` counts overhead-tagged gates in CX-equivalents:
    a routed SWAP counts 3 (its lowered CX cost), everything else 1.
    """
    cx = io = route = oneq = 0
    overhead = 0
    for g in pc.gates:
        if g.kind == "cx":
            cx += 1
        elif g.kind in ("swap_out", "swap_in"):
            io += 1
        elif g.kind == "swap":
            route += 1
        elif g.kind in ONE_QUBIT_PHYS:
            oneq += 1
        if g.overhead:
            overhead += 3 if g.kind == "swap" else 1
    return RoutingMetrics(cx_count=cx, one_qubit_count=oneq, swap_io_count=io,
                          swap_route_count=route, depth=circuit_depth(pc),
                          total_gates=len(pc.gates),
                          routing_overhead=overhead)


def lower_physical(pc: PhysicalCircuit) -> PhysicalCircuit:
    """Expand SWAPs into their 3-CX realization.

    Meant for gate counting; scheduling prices an atomic SWAP as its 3-CX
    duration anyway. The pure-state simulator still reproduces the original
    circuit: a triple between occupied resources moves states without
    relabeling (axes realign against ``final_placement`` at the end), and a
    triple against an unoccupied resource is recognized as the relocation
    it spells. The timed density simulator consumes emitter output, where
    SWAPs stay atomic."""
    gates: list[PhysicalGate] = []
    for g in pc.gates:
        if g.kind == "swap":
            a, b = g.resources
            gates += [PhysicalGate("cx", (a, b), overhead=g.overhead),
                      PhysicalGate("cx", (b, a), overhead=g.overhead),
                      PhysicalGate("cx", (a, b), overhead=g.overhead)]
        else:
            gates.append(g)
    return PhysicalCircuit(pc.topology, pc.num_qubits, gates,
                           list(pc.initial_placement),
                           list(pc.final_placement))


# ---------------------------------------------------------------------------
# peephole: cancel adjacent store/fetch pairs
# ---------------------------------------------------------------------------

def cancel_swaps(gates: list[PhysicalGate]) -> list[PhysicalGate]:
    """Delete swap_in/swap_out pairs on the same (transmon, mode) with no
    intervening gate on either resource. Idempotent and unitary-preserving:
    the qubit simply stays on the transmon through the window."""
    work = list(gates)
    changed = True
    while changed:
        changed = False
        # pending swap_in per (transmon, mode) -> index, invalidated by any
        # later touch of either resource
        pending: dict[tuple[int, int], int] = {}
        drop: set[int] = set()
        for i, g in enumerate(work):
            if g.kind == "swap_in":
                t, mode = g.resources
                _invalidate(pending, g.resources)
                pending[(t, mode)] = i
            elif g.kind == "swap_out":
                mode, t = g.resources
                j = pending.pop((t, mode), None)
                _invalidate(pending, g.resources)
                if j is not None:
                    drop.add(j)
                    drop.add(i)
            else:
                _invalidate(pending, g.resources)
        if drop:
            work = [g for i, g in enumerate(work) if i not in drop]
            changed = True
    return work


def _invalidate(pending: dict, resources: tuple[int, ...]) -> None:
    stale = [key for key in pending if key[0] in resources or key[1] in resources]
    for key in stale:
        del pending[key]


# ---------------------------------------------------------------------------
# cavity transpiler
# ---------------------------------------------------------------------------

class CavityTranspiler:
    """Stateful gate emitter for multimode-cavity devices.

    Tracks qubit placement (mode or transmon), reserved home modes, and the
    current qubit-to-cavity groupings. Emission primitives implement the
    fetch/hold/store discipline: a qubit fetched onto its cavity's transmon
    stays there until the transmon is needed by a cavity-mate or the current
    term flushes.
    """

    def __init__(self, topo: Topology, groupings: Groupings):
        if topo.kind != "cavity":
            raise ValueError("CavityTranspiler needs a cavity topology")
        if groupings.num_cavities != topo.cavities:
            raise ValueError("groupings do not match topology cavity count")
        if any(c > topo.modes_per_cavity for c in groupings.capacities):
            raise ValueError("groupings capacity exceeds modes per cavity")
        self.topo = topo
        self.groupings = groupings.copy()
        self.gates: list[PhysicalGate] = []
        self.num_qubits = len(groupings.assignment)
        # qubits of each cavity fill its modes in ascending qubit order
        self.placement: list[int] = [-1] * self.num_qubits
        self.mode_holder: dict[int, int | None] = {
            m: None for c in range(topo.cavities) for m in topo.cavity_modes(c)}
        self.transmon_holder: dict[int, int | None] = {
            t: None for t in topo.transmons}
        for c in range(topo.cavities):
            for rank, q in enumerate(self.groupings.members(c)):
                mode = topo.mode_id(c, rank)
                self.placement[q] = mode
                self.mode_holder[mode] = q
        self.initial_placement = list(self.placement)
        self.home_mode: dict[int, int] = {q: self.placement[q]
                                          for q in range(self.num_qubits)}

    # -- movement primitives -------------------------------------------------

    def _emit(self, kind, resources, angle=None, param=None, overhead=False):
        self.gates.append(PhysicalGate(kind, tuple(resources), angle=angle,
                                       param=param, overhead=overhead))

    def _cavity_of(self, q: int) -> int:
        return self.groupings.assignment[q]

    def _transmon(self, q: int) -> int:
        return self.topo.transmon_of_cavity(self._cavity_of(q))

    def is_out(self, q: int) -> bool:
        return self.topo.is_transmon(self.placement[q])

    def store(self, q: int) -> None:
        """swap_in q from its transmon back to its reserved home mode."""
        t = self.placement[q]
        mode = self.home_mode[q]
        self._emit("swap_in", (t, mode), overhead=True)
        self.transmon_holder[t] = None
        self.mode_holder[mode] = q
        self.placement[q] = mode

    def fetch(self, q: int) -> int:
        """Bring q onto its cavity's transmon, storing any current holder."""
        if self.is_out(q):
            return self.placement[q]
        t = self._transmon(q)
        holder = self.transmon_holder[t]
        if holder is not None:
            self.store(holder)
        mode = self.placement[q]
        self._emit("swap_out", (mode, t), overhead=True)
        self.mode_holder[mode] = None
        self.transmon_holder[t] = q
        self.placement[q] = t
        return t

    def flush(self) -> None:
        """Store every fetched qubit (ascending qubit order)."""
        for q in range(self.num_qubits):
            if self.is_out(q):
                self.store(q)

    def _transmon_path(self, ta: int, tb: int) -> list[int]:
        """Lexicographically smallest shortest transmon path over coupling
        edges (modes are excluded so shared-io shortcuts are never taken)."""
        coupled = {t: [] for t in self.topo.transmons}
        for (a, b), kind in self.topo.edge_kinds.items():
            if kind == "coupling":
                coupled[a].append(b)
                coupled[b].append(a)
        for v in coupled.values():
            v.sort()
        dist = {tb: 0}
        frontier = [tb]
        while frontier:
            nxt = []
            for u in frontier:
                for v in coupled[u]:
                    if v not in dist:
                        dist[v] = dist[u] + 1
                        nxt.append(v)
            frontier = nxt
        if ta not in dist:
            raise ValueError(f"transmons {ta} and {tb} are not connected")
        path = [ta]
        cur = ta
        while cur != tb:
            cur = min(v for v in coupled[cur] if dist.get(v) == dist[cur] - 1)
            path.append(cur)
        return path

    def _ride(self, q: int, path: list[int]) -> None:
        """Move q along a transmon path with routing SWAPs, storing any
        holders encountered on the way."""
        for nxt in path[1:]:
            holder = self.transmon_holder[nxt]
            if holder is not None:
                self.store(holder)
            cur = self.placement[q]
            self._emit("swap", (cur, nxt), overhead=True)
            self.transmon_holder[cur] = None
            self.transmon_holder[nxt] = q
            self.placement[q] = nxt

    def cx(self, qc: int, qt: int, overhead: bool = False) -> None:
        """CX between two fetched qubits, routing across transmons if their
        cavities are not directly coupled (control rides, then rides back)."""
        tc, tt = self.placement[qc], self.placement[qt]
        if not (self.topo.is_transmon(tc) and self.topo.is_transmon(tt)):
            raise ValueError("cx operands must be fetched first")
        path = self._transmon_path(tc, tt)
        if len(path) == 2:
            self._emit("cx", (tc, tt), overhead=overhead)
            return
        ride = path[:-1]
        self._ride(qc, ride)
        self._emit("cx", (self.placement[qc], tt), overhead=overhead)
        self._ride(qc, list(reversed(ride)))

    def gate1(self, kind: str, q: int, angle=None, param=None) -> None:
        """Fetch q and apply a single-qubit payload gate on its transmon."""
        t = self.fetch(q)
        self._emit(kind, (t,), angle=angle, param=param, overhead=False)

    # -- term synthesis -------------------------------------------------------

    def _basis_in(self, term: PauliTerm, q: int) -> None:
        axis = term.axis(q)
        if axis == "X":
            self._emit("h", (self.placement[q],))
        elif axis == "Y":
            self._emit("rx", (self.placement[q],), angle=math.pi / 2)

    def _basis_out(self, term: PauliTerm, q: int) -> None:
        axis = term.axis(q)
        if axis == "X":
            self._emit("h", (self.placement[q],))
        elif axis == "Y":
            self._emit("rx", (self.placement[q],), angle=-math.pi / 2)

    def _term_order(self, actives: list[int]) -> list[int]:
        """Order actives so consecutive entries sit in different cavities.

        Balanced terms (imbalance <= 1) interleave greedily from the largest
        remaining cavity; imbalanced terms alternate majority/other until the
        others run out, leaving the remaining majority qubits to root-entangle
        into the chain's last (non-majority) qubit.
        """
        by_cavity: dict[int, list[int]] = {}
        for q in actives:
            by_cavity.setdefault(self._cavity_of(q), []).append(q)
        for v in by_cavity.values():
            v.sort()
        counts = {c: len(v) for c, v in by_cavity.items()}
        top = max(counts.values())
        imbalance = 2 * top - len(actives)
        if imbalance <= 1:
            order = []
            prev = None
            remaining = {c: list(v) for c, v in by_cavity.items()}
            for _ in range(len(actives)):
                pick = max((c for c in sorted(remaining) if c != prev
                            and remaining[c]),
                           key=lambda c: (len(remaining[c]), -c))
                order.append(remaining[pick].pop(0))
                prev = pick
            return order
        majority = min(c for c, n in counts.items() if n == top)
        majors = by_cavity[majority]
        others = [q for c in sorted(by_cavity) if c != majority
                  for q in by_cavity[c]]
        order = []
        for m, o in zip(majors, others):
            order += [m, o]
        order += majors[len(others):]
        return order

    def add_term(self, term: PauliTerm, theta: float | None = None,
                 theta_param: tuple[int, float] | None = None) -> None:
        """Emit one Pauli-evolution block exp(-i theta coeff P) and flush.

        The RZ angle is 2*theta*coeff (or carries a parameter slot with
        multiplier 2*mult*coeff when ``theta_param=(slot, mult)``).
        """
        actives = term.active_qubits()
        if not actives:
            return
        if theta_param is not None:
            slot, mult = theta_param
            rz_angle, rz_param = None, (slot, 2.0 * mult * term.coeff)
        else:
            rz_angle, rz_param = 2.0 * theta * term.coeff, None
        if len(actives) == 1:
            q = actives[0]
            self.fetch(q)
            self._basis_in(term, q)
            self._emit("rz", (self.placement[q],), angle=rz_angle,
                       param=rz_param)
            self._basis_out(term, q)
            self.flush()
            return
        if term_imbalance(term, self.groupings) >= 2 \
                and len({self._cavity_of(q) for q in actives}) == 1:
            raise ValueError("term is captured in one cavity; reallocate first")
        order = self._term_order(actives)
        imbalance = term_imbalance(term, self.groupings)
        split = len(order) - 1 if imbalance <= 1 else \
            2 * (len(actives) - active_counts(term, self.groupings)[
                majority_cavity(term, self.groupings)]) - 1
        fwd = [(order[k], order[k + 1]) for k in range(split)]
        fwd += [(order[j], order[split]) for j in range(split + 1, len(order))]
        sink = order[split]
        dressed: set[int] = set()

        def prepare(q: int) -> None:
            if q not in dressed:
                self.fetch(q)
                self._basis_in(term, q)
                dressed.add(q)
            else:
                self.fetch(q)

        for qc, qt in fwd:
            prepare(qc)
            prepare(qt)
            self.cx(qc, qt)
        self._emit("rz", (self.placement[sink],), angle=rz_angle,
                   param=rz_param)
        mirror = list(reversed(fwd))
        for idx, (qc, qt) in enumerate(mirror):
            prepare(qc)
            prepare(qt)
            self.cx(qc, qt)
            rest = mirror[idx + 1:]
            for q in (qt, qc):
                if not any(q in pair for pair in rest):
                    self._basis_out(term, q)
        self.flush()

    # -- raw circuit primitives ----------------------------------------------

    def add_cx_raw(self, qa: int, qb: int) -> None:
        """CX for raw (non-term) circuits; same-cavity operands take the
        naive stage-through-a-neighbor fallback."""
        if self._cavity_of(qa) == self._cavity_of(qb):
            self.naive_same_cavity_cx(qa, qb)
        else:
            self.fetch(qa)
            self.fetch(qb)
            self.cx(qa, qb)

    def naive_same_cavity_cx(self, qa: int, qb: int) -> None:
        """Two-qubit gate inside one cavity without reallocation: fetch the
        control, park it on a neighboring transmon, fetch the target, apply,
        and undo. Costs 7 sequential steps against the protocol's 3."""
        cav = self._cavity_of(qa)
        if cav != self._cavity_of(qb):
            raise ValueError("operands are not in the same cavity")
        t = self.topo.transmon_of_cavity(cav)
        neighbors = [v for v in self._transmon_couplings(t)]
        if not neighbors:
            raise ValueError("cavity transmon has no coupled neighbor")
        t2 = neighbors[0]
        for q in (qa, qb):
            if self.is_out(q):
                self.store(q)
        holder = self.transmon_holder[t2]
        if holder is not None:
            self.store(holder)
        self.fetch(qa)
        self._emit("swap", (t, t2), overhead=True)
        self.transmon_holder[t2] = qa
        self.transmon_holder[t] = None
        self.placement[qa] = t2
        self.fetch(qb)
        self._emit("cx", (t2, t))
        self.store(qb)
        self._emit("swap", (t2, t), overhead=True)
        self.transmon_holder[t] = qa
        self.transmon_holder[t2] = None
        self.placement[qa] = t
        self.store(qa)

    def _transmon_couplings(self, t: int) -> list[int]:
        out = []
        for (a, b), kind in sorted(self.topo.edge_kinds.items()):
            if kind != "coupling":
                continue
            if a == t:
                out.append(b)
            elif b == t:
                out.append(a)
        return sorted(out)

    # -- reallocation ---------------------------------------------------------

    def apply_relocation(self, plan) -> None:
        """Physically carry out a reallocation plan and update groupings."""
        self.flush()
        for qa, qb in plan.exchanges:
            self._exchange(qa, qb)
        for q, dest in plan.moves:
            self._move(q, dest)

    def _exchange(self, qa: int, qb: int) -> None:
        ga, gb = self._cavity_of(qa), self._cavity_of(qb)
        if ga == gb:
            raise ValueError("exchange needs qubits in different cavities")
        ta, tb = self.topo.transmon_of_cavity(ga), self.topo.transmon_of_cavity(gb)
        mode_a, mode_b = self.placement[qa], self.placement[qb]
        self.fetch(qa)
        self.fetch(qb)
        path = self._transmon_path(ta, tb)
        if len(path) > 2:
            self._ride(qa, path[:-1])
        ca = self.placement[qa]
        # transmon-level exchange as explicit 3-CX
        self._emit("cx", (ca, tb), overhead=True)
        self._emit("cx", (tb, ca), overhead=True)
        self._emit("cx", (ca, tb), overhead=True)
        self.transmon_holder[ca], self.transmon_holder[tb] = qb, qa
        self.placement[qa], self.placement[qb] = tb, ca
        if len(path) > 2:
            self._ride(qb, list(reversed(path[:-1])))
        # crossed store: each lands in the other's vacated home mode
        self.home_mode[qa], self.home_mode[qb] = mode_b, mode_a
        self.groupings.assignment[qa] = gb
        self.groupings.assignment[qb] = ga
        self.store(qa)
        self.store(qb)

    def _move(self, q: int, dest: int) -> None:
        src = self._cavity_of(q)
        if src == dest:
            return
        counts = self.groupings.counts()
        if counts[dest] >= self.groupings.capacities[dest]:
            raise ValueError(f"cavity {dest} is full")
        td = self.topo.transmon_of_cavity(dest)
        free = [m for m in self.topo.cavity_modes(dest)
                if self.mode_holder[m] is None]
        target_mode = free[0]
        self.fetch(q)
        self._ride(q, self._transmon_path(self.placement[q], td))
        self.home_mode[q] = target_mode
        self.groupings.assignment[q] = dest
        self.store(q)

    # -- driver ----------------------------------------------------------------

    def _is_captured(self, term: PauliTerm) -> bool:
        actives = term.active_qubits()
        return len(actives) >= 2 \
            and len({self._cavity_of(q) for q in actives}) == 1

    def run_terms(self, h: Hamiltonian, thetas=None, theta_params=None) -> None:
        """Transpile every term in Hamiltonian order, reallocating on demand.

        Trotter products of non-commuting terms are order-sensitive, so
        captured terms are never deferred past later terms. When the next
        term in order is captured, a reallocation plan is computed for that
        term alone: planning over the whole captured set can free a
        different term while leaving the blocker captured (and then undo
        itself on the next pass), whereas the single-term plan always moves
        one of the blocker's own qubits and unblocks it in one step.
        """
        if thetas is None and theta_params is None:
            raise ValueError("need thetas or theta_params")
        for i, term in enumerate(h.terms):
            if self._is_captured(term):
                plan = plan_reallocation(h, self.groupings, [i])
                self.apply_relocation(plan)
                if self._is_captured(term):
                    raise RuntimeError("reallocation failed to unblock a term")
            if theta_params is not None:
                self.add_term(term, theta_param=theta_params[i])
            else:
                self.add_term(term, theta=thetas[i])

    def finish(self, optimize: bool = True) -> PhysicalCircuit:
        self.flush()
        gates = cancel_swaps(self.gates) if optimize else list(self.gates)
        final = [-1] * self.num_qubits
        for q in range(self.num_qubits):
            final[q] = self.placement[q]
        return PhysicalCircuit(self.topo, self.num_qubits, gates,
                               list(self.initial_placement), final)


def transpile_cavity(h: Hamiltonian, topo: Topology, thetas=None,
                     seed: int = 0, groupings: Groupings | None = None,
                     optimize: bool = True) -> PhysicalCircuit:
    """Transpile a trotter slice onto a cavity device.

    Partitions qubits over cavities from the interaction graph (unless
    ``groupings`` is supplied), then stages each term through the transmons.
    """
    if thetas is None:
        thetas = [1.0] * len(h.terms)
    if groupings is None:
        groupings = partition_for_topology(h, topo, seed=seed)
    tr = CavityTranspiler(topo, groupings)
    tr.run_terms(h, thetas=thetas)
    return tr.finish(optimize=optimize)


def transpile_raw_cavity(circuit: LogicalCircuit, topo: Topology,
                         groupings: Groupings | None = None, seed: int = 0,
                         optimize: bool = True) -> PhysicalCircuit:
    """Transpile an arbitrary logical circuit onto a cavity device.

    Single-qubit gates stage their qubit onto the cavity transmon; CXs use
    the cross-cavity protocol when operands live in different cavities and
    the naive stage-through-a-neighbor fallback otherwise. Logical SWAPs
    are synthesized as 3 CXs. Store/fetch pairs left by consecutive gates
    on held qubits are cancelled afterwards.
    """
    if groupings is None:
        pairs: dict[tuple[int, int], int] = {}
        for g in circuit.gates:
            if len(g.qubits) == 2:
                a, b = sorted(g.qubits)
                pairs[(a, b)] = pairs.get((a, b), 0) + 1
        terms = []
        for (a, b), w in sorted(pairs.items()):
            pauli = "".join("Z" if q in (a, b) else "I"
                            for q in range(circuit.num_qubits))
            terms.append(PauliTerm(pauli, float(w)))
        proxy = Hamiltonian(circuit.num_qubits, terms)
        groupings = partition_for_topology(proxy, topo, seed=seed)
    tr = CavityTranspiler(topo, groupings)
    for g in circuit.gates:
        if g.kind == "measure":
            continue
        if len(g.qubits) == 1:
            tr.gate1(g.kind, g.qubits[0], angle=g.angle, param=g.param)
        elif g.kind == "cx":
            tr.add_cx_raw(*g.qubits)
        elif g.kind == "swap":
            qa, qb = g.qubits
            tr.add_cx_raw(qa, qb)
            tr.add_cx_raw(qb, qa)
            tr.add_cx_raw(qa, qb)
        else:
            raise ValueError(f"cannot stage two-qubit kind {g.kind!r}")
    return tr.finish(optimize=optimize)


def emit_two_qubit_protocol(topo: Topology, groupings: Groupings, qa: int,
                            qb: int, core: str = "cx") -> PhysicalCircuit:
    """The cavity two-qubit gate protocol: parallel fetches, the core gate,
    parallel stores. 5 gates / 3 ASAP steps / 300 ns for coupled cavities;
    non-coupled cavities get transmon routing inserted (depth > 3)."""
    if groupings.assignment[qa] == groupings.assignment[qb]:
        raise ValueError("same-cavity operands: use the term machinery or "
                         "the naive fallback")
    tr = CavityTranspiler(topo, groupings)
    tr.fetch(qa)
    tr.fetch(qb)
    if core == "cx":
        tr.cx(qa, qb)
    else:
        raise ValueError(f"unknown core {core!r}")
    return tr.finish(optimize=False)


def emit_same_cavity_naive(topo: Topology, groupings: Groupings, qa: int,
                           qb: int) -> PhysicalCircuit:
    """Naive same-cavity CX without reallocation (7 sequential steps)."""
    tr = CavityTranspiler(topo, groupings)
    tr.naive_same_cavity_cx(qa, qb)
    return tr.finish(optimize=False)


# ---------------------------------------------------------------------------
# lattice router
# ---------------------------------------------------------------------------

def _layout(circuit: LogicalCircuit, topo: Topology, kind: str) -> list[int]:
    n = circuit.num_qubits
    if n > topo.num_resources:
        raise ValueError(f"{n} qubits exceed {topo.num_resources} sites")
    if kind == "trivial":
        return list(range(n))
    if kind == "degree_matched":
        interactions = [0] * n
        for g in circuit.gates:
            if len(g.qubits) == 2:
                for q in g.qubits:
                    interactions[q] += 1
        logical = sorted(range(n), key=lambda q: (-interactions[q], q))
        physical = sorted(range(topo.num_resources),
                          key=lambda r: (-topo.degree(r), r))
        placement = [-1] * n
        for lq, pr in zip(logical, physical):
            placement[lq] = pr
        return placement
    raise ValueError(f"unknown layout {kind!r}")


def route_lattice(circuit: LogicalCircuit, topo: Topology,
                  initial_layout: str = "trivial") -> PhysicalCircuit:
    """Greedy SWAP router for 2D lattices.

    Each two-qubit gate at placement distance N inserts N-1 SWAPs along the
    lexicographically smallest BFS shortest path (moving the first operand
    toward the second), then applies the gate. Placement changes persist;
    the tracked final placement supports equivalence checks.
    """
    if topo.kind == "cavity":
        raise ValueError("route_lattice needs a lattice topology")
    placement = _layout(circuit, topo, initial_layout)
    holder: dict[int, int | None] = {r: None for r in range(topo.num_resources)}
    for q, r in enumerate(placement):
        holder[r] = q
    gates: list[PhysicalGate] = []
    initial = list(placement)
    for g in circuit.gates:
        if len(g.qubits) == 1:
            gates.append(PhysicalGate(g.kind, (placement[g.qubits[0]],),
                                      angle=g.angle, param=g.param))
            continue
        qa, qb = g.qubits
        pa, pb = placement[qa], placement[qb]
        path = topo.shortest_path_lex(pa, pb)
        for step in range(len(path) - 2):
            a, b = path[step], path[step + 1]
            gates.append(PhysicalGate("swap", (a, b), overhead=True))
            ha, hb = holder[a], holder[b]
            holder[a], holder[b] = hb, ha
            if ha is not None:
                placement[ha] = b
            if hb is not None:
                placement[hb] = a
        gates.append(PhysicalGate(g.kind,
                                  (placement[qa], placement[qb]),
                                  angle=g.angle, param=g.param))
    return PhysicalCircuit(topo, circuit.num_qubits, gates, initial,
                           list(placement))
