"""Logical circuits: gate IR, trotter-step synthesis and variational ansatze.

A :class:`LogicalCircuit` addresses abstract qubits 0..n-1 with no topology
attached. The transpilers in :mod:`cavq.transpile` map these onto hardware.

Parameter slots: gates may carry ``param`` = (slot, multiplier) instead of a
fixed angle, meaning ``angle = multiplier * params[slot]`` at bind time. This
lets variational drivers rebind angles without rebuilding (or re-routing) the
circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .pauli import PauliTerm

ONE_QUBIT_KINDS = {"h", "x", "sx", "id", "rz", "rx", "ry"}
TWO_QUBIT_KINDS = {"cx", "swap"}
BASIS_KINDS = {"cx", "rz", "sx", "x", "id", "measure"}


@dataclass(frozen=True)
class Gate:
    """One logical gate. ``qubits`` is a tuple; control first for cx."""

    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None
    param: tuple[int, float] | None = None  # (slot, multiplier)

    def __post_init__(self) -> None:
        if self.kind in ONE_QUBIT_KINDS or self.kind == "measure":
            if len(self.qubits) != 1:
                raise ValueError(f"{self.kind} takes one qubit")
        elif self.kind in TWO_QUBIT_KINDS:
            if len(self.qubits) != 2 or self.qubits[0] == self.qubits[1]:
                raise ValueError(f"{self.kind} takes two distinct qubits")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    def bound_angle(self, params=None) -> float | None:
        if self.param is not None:
            if params is None:
                raise ValueError("gate has an unbound parameter")
            slot, mult = self.param
            return mult * params[slot]
        return self.angle


@dataclass
class LogicalCircuit:
    num_qubits: int
    gates: list[Gate]

    def __post_init__(self) -> None:
        for g in self.gates:
            if any(q < 0 or q >= self.num_qubits for q in g.qubits):
                raise ValueError(f"gate {g} out of range for n={self.num_qubits}")

    def __len__(self) -> int:
        return len(self.gates)

    def bind(self, params) -> "LogicalCircuit":
        """Resolve every parameter slot to a concrete angle."""
        bound = []
        for g in self.gates:
            if g.param is not None:
                bound.append(replace(g, angle=g.bound_angle(params), param=None))
            else:
                bound.append(g)
        return LogicalCircuit(self.num_qubits, bound)

    def num_params(self) -> int:
        slots = {g.param[0] for g in self.gates if g.param is not None}
        return 1 + max(slots) if slots else 0


def gate_matrix(kind: str, angle: float | None = None) -> np.ndarray:
    """2x2 or 4x4 unitary for a gate kind (control-first for cx)."""
    if kind == "h":
        return np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    if kind == "x":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "sx":
        return np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2
    if kind == "id":
        return np.eye(2, dtype=complex)
    if kind == "rz":
        return np.array([[np.exp(-0.5j * angle), 0],
                         [0, np.exp(0.5j * angle)]], dtype=complex)
    if kind == "rx":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    if kind == "ry":
        c, s = math.cos(angle / 2), math.sin(angle / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "cx":
        return np.array([[1, 0, 0, 0],
                         [0, 1, 0, 0],
                         [0, 0, 0, 1],
                         [0, 0, 1, 0]], dtype=complex)
    if kind == "swap":
        return np.array([[1, 0, 0, 0],
                         [0, 0, 1, 0],
                         [0, 1, 0, 0],
                         [0, 0, 0, 1]], dtype=complex)
    raise ValueError(f"no matrix for gate kind {kind!r}")


# ---------------------------------------------------------------------------
# Pauli-evolution synthesis
# ---------------------------------------------------------------------------

def _basis_change(axis: str, qubit: int, into_z: bool) -> list[Gate]:
    if axis == "Z":
        return []
    if axis == "X":
        return [Gate("h", (qubit,))]
    if axis == "Y":
        # RX(pi/2) maps Y into the Z frame; RX(-pi/2) undoes it.
        return [Gate("rx", (qubit,), angle=math.pi / 2 if into_z else -math.pi / 2)]
    raise ValueError(f"no basis change for axis {axis!r}")


def cx_tree(actives: list[int], strategy: str = "chain",
            split_index: int | None = None) -> tuple[list[tuple[int, int]], int]:
    """Forward CX list and parity-sink qubit for an evolution block.

    chain: a0->a1->...->a_{m-1}, sink is the last active.
    root:  every other active CXs into the first, which is the sink.
    mixed: chain up to ``split_index``, remaining actives CX directly into
           actives[split_index] (the sink).
    """
    m = len(actives)
    if strategy == "chain":
        split = m - 1
    elif strategy == "root":
        split = 0
    elif strategy == "mixed":
        if split_index is None or not (0 <= split_index < m):
            raise ValueError("mixed strategy needs split_index in range")
        split = split_index
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    cxs = [(actives[k], actives[k + 1]) for k in range(split)]
    sink = actives[split]
    cxs += [(actives[j], sink) for j in range(split + 1, m)]
    return cxs, sink


def evolution_circuit(term: PauliTerm, theta: float, strategy: str = "chain",
                      split_index: int | None = None,
                      theta_slot: int | None = None) -> LogicalCircuit:
    """Circuit for exp(-i * theta * coeff * P).

    Basis changes bring every active axis to Z, a CX tree accumulates parity
    at a sink, RZ(2 * theta * coeff) applies the phase, and the mirrored tree
    plus inverse basis changes restore the frame. Uses 2*(m-1) CX gates for m
    active qubits regardless of strategy.

    With ``theta_slot`` set, the RZ carries a parameter slot (multiplier
    2*coeff) instead of a fixed angle.
    """
    n = term.num_qubits
    actives = term.active_qubits()
    gates: list[Gate] = []
    if not actives:
        # exp(-i theta c I) is a global phase: empty circuit.
        return LogicalCircuit(n, gates)
    for q in actives:
        gates += _basis_change(term.axis(q), q, into_z=True)
    if len(actives) == 1:
        sink = actives[0]
        cxs: list[tuple[int, int]] = []
    else:
        cxs, sink = cx_tree(actives, strategy, split_index)
    gates += [Gate("cx", pair) for pair in cxs]
    if theta_slot is not None:
        gates.append(Gate("rz", (sink,), param=(theta_slot, 2.0 * term.coeff)))
    else:
        gates.append(Gate("rz", (sink,), angle=2.0 * theta * term.coeff))
    gates += [Gate("cx", pair) for pair in reversed(cxs)]
    for q in reversed(actives):
        gates += _basis_change(term.axis(q), q, into_z=False)
    return LogicalCircuit(n, gates)


def trotter_circuit(hamiltonian, thetas) -> LogicalCircuit:
    """One trotter slice: each term's evolution block in list order."""
    if len(thetas) != len(hamiltonian.terms):
        raise ValueError("need one angle per term")
    gates: list[Gate] = []
    for term, theta in zip(hamiltonian.terms, thetas):
        gates += evolution_circuit(term, theta).gates
    return LogicalCircuit(hamiltonian.num_qubits, gates)


def ghz_circuit(num_qubits: int) -> LogicalCircuit:
    """H on qubit 0 followed by a CX fan-down chain: (|0..0>+|1..1>)/sqrt(2)."""
    gates = [Gate("h", (0,))]
    gates += [Gate("cx", (q, q + 1)) for q in range(num_qubits - 1)]
    return LogicalCircuit(num_qubits, gates)


# ---------------------------------------------------------------------------
# Variational ansatze
# ---------------------------------------------------------------------------

def qaoa_ansatz(graph, layers: int, gammas=None, betas=None,
                parametrized: bool = False) -> LogicalCircuit:
    """MaxCut QAOA: H on every qubit, then per layer a ZZ block per edge
    (CX, RZ(gamma), CX) followed by the RX(2*beta) mixer on every qubit.

    Parameter layout when ``parametrized``: slot 2k is gamma_k, slot 2k+1 is
    beta_k.
    """
    n = graph.nodes
    gates = [Gate("h", (q,)) for q in range(n)]
    for k in range(layers):
        for i, j in graph.edges:
            gates.append(Gate("cx", (i, j)))
            if parametrized:
                gates.append(Gate("rz", (j,), param=(2 * k, 1.0)))
            else:
                gates.append(Gate("rz", (j,), angle=gammas[k]))
            gates.append(Gate("cx", (i, j)))
        for q in range(n):
            if parametrized:
                gates.append(Gate("rx", (q,), param=(2 * k + 1, 2.0)))
            else:
                gates.append(Gate("rx", (q,), angle=2.0 * betas[k]))
    return LogicalCircuit(n, gates)


def hwe_ansatz(num_qubits: int, layers: int, params=None,
               parametrized: bool = False) -> LogicalCircuit:
    """Hardware-efficient ansatz: per layer RY(t), RZ(t') on every qubit and
    a linear CX chain q0->q1->...->q_{n-1}. Parameter order is layer-major,
    qubit-major, (RY, RZ): slot 2*(layer*n + q) is the RY angle.
    """
    n = num_qubits
    expected = 2 * n * layers
    if not parametrized:
        if params is None or len(params) != expected:
            raise ValueError(f"need {expected} parameters")
    gates: list[Gate] = []
    for layer in range(layers):
        for q in range(n):
            base = 2 * (layer * n + q)
            if parametrized:
                gates.append(Gate("ry", (q,), param=(base, 1.0)))
                gates.append(Gate("rz", (q,), param=(base + 1, 1.0)))
            else:
                gates.append(Gate("ry", (q,), angle=params[base]))
                gates.append(Gate("rz", (q,), angle=params[base + 1]))
        for q in range(n - 1):
            gates.append(Gate("cx", (q, q + 1)))
    return LogicalCircuit(n, gates)


# ---------------------------------------------------------------------------
# Basis lowering
# ---------------------------------------------------------------------------

def _u3_gates(qubit: int, theta: float, phi: float, lam: float) -> list[Gate]:
    # U3(theta, phi, lam) == RZ(phi + pi) . SX . RZ(theta + pi) . SX . RZ(lam)
    # up to global phase; emitted first-gate-first.
    return [
        Gate("rz", (qubit,), angle=lam),
        Gate("sx", (qubit,)),
        Gate("rz", (qubit,), angle=theta + math.pi),
        Gate("sx", (qubit,)),
        Gate("rz", (qubit,), angle=phi + math.pi),
    ]


def lower_gate(g: Gate) -> list[Gate]:
    """Rewrite one gate into the {CX, RZ, SX, X, Id, MEASURE} basis."""
    if g.kind in BASIS_KINDS:
        return [g]
    q = g.qubits[0]
    if g.kind == "h":
        half = math.pi / 2
        return [Gate("rz", (q,), angle=half), Gate("sx", (q,)),
                Gate("rz", (q,), angle=half)]
    if g.kind == "swap":
        a, b = g.qubits
        return [Gate("cx", (a, b)), Gate("cx", (b, a)), Gate("cx", (a, b))]
    if g.param is not None:
        raise ValueError("bind parameters before lowering")
    if g.kind == "rx":
        if math.isclose(g.angle, math.pi / 2, abs_tol=1e-12):
            return [Gate("sx", (q,))]
        if math.isclose(g.angle, -math.pi / 2, abs_tol=1e-12):
            return [Gate("rz", (q,), angle=math.pi), Gate("sx", (q,)),
                    Gate("rz", (q,), angle=math.pi)]
        return _u3_gates(q, g.angle, -math.pi / 2, math.pi / 2)
    if g.kind == "ry":
        return _u3_gates(q, g.angle, 0.0, 0.0)
    raise ValueError(f"cannot lower gate kind {g.kind!r}")


def lower_to_basis(circuit: LogicalCircuit) -> LogicalCircuit:
    """Rewrite a circuit into the native basis. Idempotent."""
    gates: list[Gate] = []
    for g in circuit.gates:
        gates += lower_gate(g)
    return LogicalCircuit(circuit.num_qubits, gates)
