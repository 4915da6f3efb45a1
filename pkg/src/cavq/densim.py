"""Density-matrix simulation with coherence-limited T1/T2 noise.

Every gate is an ideal unitary; the only error channel is per-resource
amplitude damping + pure dephasing applied over gate durations and idle
gaps. Rates depend on the resource class a qubit occupies: cavity modes
are long-lived, transmons short-lived.

The state is tracked over *logical* qubits. Relocations (swap_in/swap_out/
routed SWAPs) permute the qubit-to-resource binding without touching the
density matrix, which is exact: the vacated resource holds |0>, a fixpoint
of both decay channels, and the moving qubit accrues decay at the rates of
the resource it occupied during the relocation window.

Channel math (time t, rates T1, T2 with T2 <= 2 T1):

    gamma = 1 - exp(-t/T1)            amplitude damping
    1/Tphi = 1/T2 - 1/(2 T1)          pure dephasing rate
    lam   = 1 - exp(-t/Tphi)

Composing the two single-qubit channels gives the fused update used by the
kernels: rho00 += gamma*rho11, rho11 *= (1-gamma), off-diagonals *= eta
with eta = exp(-t/T2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuits import LogicalCircuit, gate_matrix
from .kernels import (psi_apply_1q, psi_apply_2q, psi_apply_cx, psi_apply_rz,
                      rho_apply_1q, rho_apply_2q, rho_apply_cx, rho_apply_rz,
                      rho_decay)
from .pauli import Hamiltonian
from .schedule import GateTimes, Schedule, asap_schedule
from .transpile import PhysicalCircuit, alignment_permutation

MAX_DENSITY_QUBITS = 12
MAX_STATEVECTOR_QUBITS = 20

_US = 1_000.0
_MS = 1_000_000.0


@dataclass(frozen=True)
class NoiseParams:
    """Per-resource-class T1/T2 times in nanoseconds (inf = noiseless)."""

    transmon_t1: float = 250.0 * _US
    transmon_t2: float = 250.0 * _US
    cavity_t1: float = 30.0 * _MS
    cavity_t2: float = 30.0 * _MS

    def __post_init__(self):
        for t1, t2, label in ((self.transmon_t1, self.transmon_t2, "transmon"),
                              (self.cavity_t1, self.cavity_t2, "cavity")):
            if not (t1 > 0 and t2 > 0):
                raise ValueError(f"{label} T1/T2 must be positive")
            if t2 > 2.0 * t1:
                raise ValueError(f"{label} T2={t2} exceeds 2*T1={2 * t1}")

    @classmethod
    def default(cls) -> "NoiseParams":
        return cls()

    @classmethod
    def companion(cls) -> "NoiseParams":
        return cls(transmon_t1=0.1 * _MS, transmon_t2=0.1 * _MS,
                   cavity_t1=1.0 * _MS, cavity_t2=1.0 * _MS)

    @classmethod
    def noiseless(cls) -> "NoiseParams":
        return cls(transmon_t1=math.inf, transmon_t2=math.inf,
                   cavity_t1=math.inf, cavity_t2=math.inf)

    @classmethod
    def from_name(cls, name: str) -> "NoiseParams":
        try:
            return {"default": cls.default, "companion": cls.companion,
                    "none": cls.noiseless, "noiseless": cls.noiseless}[name]()
        except KeyError:
            raise ValueError(f"unknown noise preset {name!r}") from None

    def rates_for(self, is_mode: bool) -> tuple[float, float]:
        if is_mode:
            return self.cavity_t1, self.cavity_t2
        return self.transmon_t1, self.transmon_t2

    @property
    def is_noiseless(self) -> bool:
        return all(math.isinf(t) for t in (self.transmon_t1, self.transmon_t2,
                                           self.cavity_t1, self.cavity_t2))


def decay_factors(t: float, t1: float, t2: float) -> tuple[float, float]:
    """(gamma, eta) for the fused channel over time t."""
    gamma = 0.0 if math.isinf(t1) else -math.expm1(-t / t1)
    eta = 1.0 if math.isinf(t2) else math.exp(-t / t2)
    return gamma, eta


def dephasing_lambda(t: float, t1: float, t2: float) -> float:
    """Pure-dephasing probability lam = 1 - exp(-t/Tphi)."""
    inv_tphi = (0.0 if math.isinf(t2) else 1.0 / t2) \
        - (0.0 if math.isinf(t1) else 0.5 / t1)
    if inv_tphi <= 0.0:
        return 0.0
    return -math.expm1(-t * inv_tphi)


# ---------------------------------------------------------------------------
# Kraus forms (used by tests and docs; the simulator uses the fused update)
# ---------------------------------------------------------------------------

def kraus_amplitude_damping(gamma: float) -> list[np.ndarray]:
    k0 = np.array([[1.0, 0.0], [0.0, math.sqrt(1.0 - gamma)]], dtype=complex)
    k1 = np.array([[0.0, math.sqrt(gamma)], [0.0, 0.0]], dtype=complex)
    return [k0, k1]


def kraus_dephasing(lam: float) -> list[np.ndarray]:
    k0 = math.sqrt(1.0 - lam) * np.eye(2, dtype=complex)
    k1 = math.sqrt(lam) * np.diag([1.0, 0.0]).astype(complex)
    k2 = math.sqrt(lam) * np.diag([0.0, 1.0]).astype(complex)
    return [k0, k1, k2]


def kraus_decay(gamma: float, lam: float) -> list[np.ndarray]:
    """Amplitude damping followed by pure dephasing, as one Kraus family."""
    return [d @ a for d in kraus_dephasing(lam)
            for a in kraus_amplitude_damping(gamma)]


def kraus_completeness_residual(kraus: list[np.ndarray]) -> float:
    acc = sum(k.conj().T @ k for k in kraus)
    return float(np.abs(acc - np.eye(acc.shape[0])).max())


def apply_decay(rho: np.ndarray, t: float, t1: float, t2: float,
                qubit: int = 0) -> np.ndarray:
    """Decay one qubit of a density matrix for time t at rates (t1, t2)."""
    n = int(round(math.log2(rho.shape[0])))
    gamma, eta = decay_factors(t, t1, t2)
    return rho_decay(np.array(rho, dtype=complex, order="C"), gamma, eta,
                     n, qubit)


# ---------------------------------------------------------------------------
# state wrappers
# ---------------------------------------------------------------------------

@dataclass
class DensityMatrix:
    rho: np.ndarray
    num_qubits: int

    def trace_error(self) -> float:
        return abs(float(np.trace(self.rho).real) - 1.0)

    def probabilities(self, top_k: int | None = None) -> dict[str, float]:
        diag = np.clip(np.diag(self.rho).real, 0.0, None)
        items = [(format(i, f"0{self.num_qubits}b"), float(p))
                 for i, p in enumerate(diag)]
        items.sort(key=lambda kv: (-kv[1], kv[0]))
        if top_k is not None:
            items = items[:top_k]
        return dict(items)

    def fidelity_pure(self, psi: np.ndarray) -> float:
        psi = np.asarray(psi, dtype=complex).reshape(-1)
        return float(np.real(np.vdot(psi, self.rho @ psi)))

    def expectation(self, h: Hamiltonian) -> float:
        return expectation(self.rho, h)


def expectation(rho: np.ndarray, h: Hamiltonian) -> float:
    """tr(rho H) evaluated term by term (no dense H is built)."""
    n = h.num_qubits
    dim = 1 << n
    idx = np.arange(dim)
    total = h.offset
    for term in h.terms:
        flip = 0
        phase = np.ones(dim, dtype=complex)
        for q, axis in enumerate(term.pauli):
            bit = (idx >> (n - q - 1)) & 1
            if axis == "X":
                flip |= 1 << (n - q - 1)
            elif axis == "Y":
                flip |= 1 << (n - q - 1)
                phase = phase * (1j * (1 - 2 * bit))
            elif axis == "Z":
                phase = phase * (1 - 2 * bit)
        val = np.sum(phase * rho[idx, idx ^ flip])
        total += term.coeff * float(val.real)
    return total


def fidelity_states(a: np.ndarray, b: np.ndarray) -> float:
    return float(abs(np.vdot(np.asarray(a).reshape(-1),
                             np.asarray(b).reshape(-1))) ** 2)


# ---------------------------------------------------------------------------
# logical statevector oracle
# ---------------------------------------------------------------------------

def statevector(circuit: LogicalCircuit, params=None,
                initial_state: np.ndarray | None = None) -> np.ndarray:
    """Exact noiseless statevector of a logical circuit."""
    n = circuit.num_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"{n} qubits exceed the statevector limit")
    if initial_state is None:
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial_state, dtype=complex).reshape(-1)
    for g in circuit.gates:
        if g.kind == "measure":
            continue
        angle = g.bound_angle(params)
        if g.kind == "cx":
            psi = psi_apply_cx(psi, n, g.qubits[0], g.qubits[1])
        elif g.kind == "rz":
            psi = psi_apply_rz(psi, angle, n, g.qubits[0])
        elif len(g.qubits) == 1:
            psi = psi_apply_1q(psi, gate_matrix(g.kind, angle), n, g.qubits[0])
        else:
            psi = psi_apply_2q(psi, gate_matrix(g.kind, angle), n,
                               g.qubits[0], g.qubits[1])
    return psi


# ---------------------------------------------------------------------------
# physical-circuit simulators
# ---------------------------------------------------------------------------

def _holder_from(pc: PhysicalCircuit) -> dict[int, int]:
    holder: dict[int, int] = {}
    for q, r in enumerate(pc.initial_placement):
        holder[r] = q
    return holder


def _final_alignment(pc: PhysicalCircuit, holder: dict[int, int]) -> list[int]:
    final = [-1] * pc.num_qubits
    for r, lbl in holder.items():
        final[lbl] = r
    return alignment_permutation(pc, final)


def _index_shuffle(p: list[int]) -> np.ndarray:
    """Basis-index map sending label-axis bits to their wire positions."""
    n = len(p)
    src = np.arange(1 << n)
    dst = np.zeros(1 << n, dtype=np.intp)
    for label, wire in enumerate(p):
        dst |= ((src >> (n - 1 - label)) & 1) << (n - 1 - wire)
    return dst


def _align_psi(psi: np.ndarray, p: list[int]) -> np.ndarray:
    if p == list(range(len(p))):
        return psi
    dst = _index_shuffle(p)
    out = np.empty_like(psi)
    out[dst] = psi
    return out


def _align_rho(rho: np.ndarray, p: list[int]) -> np.ndarray:
    if p == list(range(len(p))):
        return rho
    dst = _index_shuffle(p)
    out = np.empty_like(rho)
    out[np.ix_(dst, dst)] = rho
    return out


def _is_move_triple(gates, i: int, a: int, b: int) -> bool:
    """CX(a,b), CX(b,a), CX(a,b) starting at i: a state move spelled as CXs."""
    if i + 2 >= len(gates):
        return False
    want = ((a, b), (b, a), (a, b))
    return all(gates[i + k].kind == "cx" and gates[i + k].resources == want[k]
               for k in range(3))


def simulate_pure(pc: PhysicalCircuit, params=None,
                  initial_state: np.ndarray | None = None) -> np.ndarray:
    """Noiseless statevector of a physical circuit (timing-free walk).

    A CX triple against an unoccupied resource (a lowered relocation SWAP)
    is executed as the state move it spells.
    """
    n = pc.num_qubits
    if n > MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"{n} qubits exceed the statevector limit")
    if initial_state is None:
        psi = np.zeros(1 << n, dtype=complex)
        psi[0] = 1.0
    else:
        psi = np.array(initial_state, dtype=complex).reshape(-1)
    holder = _holder_from(pc)
    gates = pc.gates
    i = -1
    skip = 0
    for g in pc.gates:
        i += 1
        if skip:
            skip -= 1
            continue
        kind = g.kind
        if kind == "swap_out":
            mode, t = g.resources
            holder[t] = holder.pop(mode)
        elif kind == "swap_in":
            t, mode = g.resources
            holder[mode] = holder.pop(t)
        elif kind == "swap":
            a, b = g.resources
            qa, qb = holder.get(a), holder.get(b)
            if g.overhead:
                # relocation: the binding moves, the logical state does not
                for r, q in ((a, qb), (b, qa)):
                    if q is None:
                        holder.pop(r, None)
                    else:
                        holder[r] = q
            else:
                psi = psi_apply_2q(psi, gate_matrix("swap"), n, qa, qb)
        elif kind == "cx":
            a, b = g.resources
            qa, qb = holder.get(a), holder.get(b)
            if qa is None or qb is None:
                if (qa is None) != (qb is None) and _is_move_triple(gates, i,
                                                                    a, b):
                    src, dst = (a, b) if qa is not None else (b, a)
                    holder[dst] = holder.pop(src)
                    skip = 2
                    continue
                raise ValueError("cx on an unoccupied resource outside a "
                                 "relocation triple")
            psi = psi_apply_cx(psi, n, qa, qb)
        elif kind == "measure":
            continue
        else:
            q = holder[g.resources[0]]
            angle = g.bound_angle(params)
            if kind == "rz":
                psi = psi_apply_rz(psi, angle, n, q)
            else:
                psi = psi_apply_1q(psi, gate_matrix(kind, angle), n, q)
    return _align_psi(psi, _final_alignment(pc, holder))


def simulate(pc: PhysicalCircuit, noise: NoiseParams | None = None,
             times: GateTimes | None = None, params=None,
             hold: float = 0.0,
             initial_state: np.ndarray | None = None,
             schedule: Schedule | None = None) -> DensityMatrix:
    """Timed density-matrix simulation of a physical circuit.

    Events are swept in schedule order. Before each event, every operand
    qubit is decayed over the window since it was last touched, at the
    rates of the resource class it occupied through that window (a moving
    qubit decays at its source's rates). After the final event all live
    qubits are flushed to the makespan, plus ``hold`` extra idle time.
    """
    n = pc.num_qubits
    if n > MAX_DENSITY_QUBITS:
        raise ValueError(f"{n} qubits exceed the density-matrix limit")
    noise = noise or NoiseParams.noiseless()
    sched = schedule or asap_schedule(pc, times or GateTimes())
    topo = pc.topology

    dim = 1 << n
    if initial_state is None:
        rho = np.zeros((dim, dim), dtype=complex)
        rho[0, 0] = 1.0
    else:
        psi = np.array(initial_state, dtype=complex).reshape(-1)
        rho = np.outer(psi, psi.conj())
    holder = _holder_from(pc)
    last = [0.0] * n
    noisy = not noise.is_noiseless

    def decay_to(q: int, resource: int, t_end: float) -> None:
        dt = t_end - last[q]
        last[q] = t_end
        if not noisy or dt <= 0.0:
            return
        t1, t2 = noise.rates_for(topo.kind == "cavity"
                                 and topo.is_mode(resource))
        gamma, eta = decay_factors(dt, t1, t2)
        if gamma != 0.0 or eta != 1.0:
            nonlocal rho
            rho = rho_decay(rho, gamma, eta, n, q)

    for ev in sched.events:
        g = ev.gate
        kind = g.kind
        end = ev.start + ev.duration
        if kind == "measure":
            continue
        if kind == "swap_out":
            mode, t = g.resources
            q = holder.pop(mode)
            decay_to(q, mode, end)
            holder[t] = q
        elif kind == "swap_in":
            t, mode = g.resources
            q = holder.pop(t)
            decay_to(q, t, end)
            holder[mode] = q
        elif kind == "swap":
            a, b = g.resources
            qa, qb = holder.get(a), holder.get(b)
            if qa is not None:
                decay_to(qa, a, end)
            if qb is not None:
                decay_to(qb, b, end)
            if g.overhead:
                # relocation: the binding moves, the logical state does not
                for r, q in ((a, qb), (b, qa)):
                    if q is None:
                        holder.pop(r, None)
                    else:
                        holder[r] = q
            else:
                rho = rho_apply_2q(rho, gate_matrix("swap"), n, qa, qb)
        elif kind == "cx":
            a, b = g.resources
            qa, qb = holder[a], holder[b]
            decay_to(qa, a, end)
            decay_to(qb, b, end)
            rho = rho_apply_cx(rho, n, qa, qb)
        else:
            r = g.resources[0]
            q = holder[r]
            decay_to(q, r, end)
            angle = g.bound_angle(params)
            if kind == "rz":
                rho = rho_apply_rz(rho, angle, n, q)
            else:
                rho = rho_apply_1q(rho, gate_matrix(kind, angle), n, q)

    horizon = sched.makespan + hold
    for r, q in list(holder.items()):
        decay_to(q, r, horizon)
    rho = _align_rho(rho, _final_alignment(pc, holder))
    return DensityMatrix(rho, n)


def simulate_logical(circuit: LogicalCircuit, params=None) -> DensityMatrix:
    """Noiseless density matrix of a logical circuit (test convenience)."""
    psi = statevector(circuit, params=params)
    return DensityMatrix(np.outer(psi, psi.conj()), circuit.num_qubits)
