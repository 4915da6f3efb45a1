"""Pauli-string Hamiltonians and problem graphs.

Conventions used throughout the package:

* A Pauli string is written qubit-0-first: ``"XZII"`` applies X to qubit 0,
  Z to qubit 1 and identity to qubits 2 and 3.
* Basis-state indices are big-endian in qubit order: qubit 0 is the most
  significant bit, so ``|b0 b1 ... b_{n-1}>`` has index ``sum(b_q << (n-1-q))``.
  Probability dictionaries use the same left-to-right bitstrings as keys.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

PAULI_CHARS = "IXYZ"

_PAULI_MATS = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@dataclass(frozen=True)
class PauliTerm:
    """One weighted Pauli string, e.g. ``0.5 * XZI``."""

    pauli: str
    coeff: float = 1.0

    def __post_init__(self) -> None:
        if not self.pauli or any(c not in PAULI_CHARS for c in self.pauli):
            raise ValueError(f"invalid pauli string {self.pauli!r}")

    @property
    def num_qubits(self) -> int:
        return len(self.pauli)

    def active_qubits(self) -> list[int]:
        """Indices carrying a non-identity factor, ascending."""
        return [q for q, c in enumerate(self.pauli) if c != "I"]

    def axis(self, qubit: int) -> str:
        return self.pauli[qubit]

    def weight(self) -> int:
        return len(self.active_qubits())


@dataclass
class Hamiltonian:
    """Sum of Pauli terms plus a constant offset.

    Term order is meaningful: trotterized circuits execute terms in list
    order, so two Hamiltonians with permuted terms are different workloads.
    """

    num_qubits: int
    terms: list[PauliTerm] = field(default_factory=list)
    offset: float = 0.0

    def __post_init__(self) -> None:
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        for t in self.terms:
            if t.num_qubits != self.num_qubits:
                raise ValueError(
                    f"term {t.pauli!r} has {t.num_qubits} qubits, "
                    f"expected {self.num_qubits}")

    def __len__(self) -> int:
        return len(self.terms)

    def to_dict(self) -> dict:
        return {
            "num_qubits": self.num_qubits,
            "offset": self.offset,
            "terms": [{"pauli": t.pauli, "coeff": t.coeff} for t in self.terms],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hamiltonian":
        terms = [PauliTerm(t["pauli"], float(t.get("coeff", 1.0)))
                 for t in data["terms"]]
        return cls(num_qubits=int(data["num_qubits"]),
                   terms=terms,
                   offset=float(data.get("offset", 0.0)))

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path: str) -> "Hamiltonian":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (test/oracle scale only, n <= 12)."""
        if self.num_qubits > 12:
            raise ValueError("dense matrix limited to 12 qubits")
        dim = 1 << self.num_qubits
        out = np.zeros((dim, dim), dtype=complex)
        for t in self.terms:
            out += t.coeff * pauli_matrix(t.pauli)
        out += self.offset * np.eye(dim)
        return out

    def ground_energy(self) -> float:
        """Smallest eigenvalue by dense diagonalization."""
        return float(np.linalg.eigvalsh(self.matrix())[0])


def pauli_matrix(pauli: str) -> np.ndarray:
    """Dense Kronecker product of a Pauli string, qubit 0 first."""
    out = np.array([[1.0 + 0j]])
    for c in pauli:
        out = np.kron(out, _PAULI_MATS[c])
    return out


@dataclass
class ProblemGraph:
    """Undirected simple graph for MaxCut-style workloads."""

    nodes: int
    edges: list[tuple[int, int]]

    def __post_init__(self) -> None:
        norm = []
        seen = set()
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise ValueError(f"self-loop on node {i}")
            if not (0 <= i < self.nodes and 0 <= j < self.nodes):
                raise ValueError(f"edge ({i},{j}) out of range")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        self.edges = sorted(norm)

    def to_dict(self) -> dict:
        return {"nodes": self.nodes, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "ProblemGraph":
        # Accept an optional third (weight) element on edges; only the
        # endpoints matter for MaxCut workloads built here.
        return cls(nodes=int(data["nodes"]),
                   edges=[(int(e[0]), int(e[1])) for e in data["edges"]])

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")

    @classmethod
    def from_json(cls, path: str) -> "ProblemGraph":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def cut_value(self, assignment: list[int]) -> int:
        """Number of edges crossing a 0/1 node assignment."""
        return sum(1 for i, j in self.edges if assignment[i] != assignment[j])

    def max_cut(self) -> int:
        """Brute-force MaxCut value (exponential; small graphs only)."""
        if self.nodes > 20:
            raise ValueError("brute-force MaxCut limited to 20 nodes")
        best = 0
        for mask in range(1 << self.nodes):
            bits = [(mask >> k) & 1 for k in range(self.nodes)]
            best = max(best, self.cut_value(bits))
        return best


def ring_graph(n: int) -> ProblemGraph:
    return ProblemGraph(n, [(i, (i + 1) % n) for i in range(n)])


def maxcut_hamiltonian(graph: ProblemGraph) -> Hamiltonian:
    """Cost Hamiltonian whose expectation is minus the cut size.

    Each edge (i, j) contributes 0.5 * Z_i Z_j and -0.5 to the offset, so a
    basis state with c cut edges has energy -c and the minimum energy equals
    -MaxCut.
    """
    terms = []
    for i, j in graph.edges:
        s = ["I"] * graph.nodes
        s[i] = "Z"
        s[j] = "Z"
        terms.append(PauliTerm("".join(s), 0.5))
    return Hamiltonian(graph.nodes, terms, offset=-0.5 * len(graph.edges))


def transverse_field_ising(n: int, coupling: float = 1.0,
                           field_strength: float = 1.0) -> Hamiltonian:
    """Open-chain transverse-field Ising model

        H = -J sum_i Z_i Z_{i+1} - h sum_i X_i
    """
    terms = []
    for i in range(n - 1):
        s = ["I"] * n
        s[i] = "Z"
        s[i + 1] = "Z"
        terms.append(PauliTerm("".join(s), -coupling))
    for i in range(n):
        s = ["I"] * n
        s[i] = "X"
        terms.append(PauliTerm("".join(s), -field_strength))
    return Hamiltonian(n, terms)
