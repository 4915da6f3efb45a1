"""Variational drivers: QAOA MaxCut and hardware-efficient VQE under SPSA.

Circuits are transpiled once per (problem, topology) pair — the physical
structure carries parameter slots — and each SPSA evaluation rebinds angles
against the same precomputed schedule, so the optimizer loop never re-routes.
Costs are exact density-matrix expectations (no shot sampling by default).
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .circuits import hwe_ansatz, qaoa_ansatz
from .densim import NoiseParams, simulate
from .partition import partition_for_topology
from .pauli import (Hamiltonian, ProblemGraph, maxcut_hamiltonian,
                    transverse_field_ising)
from .schedule import GateTimes, asap_schedule
from .topology import Topology
from .transpile import (CavityTranspiler, count_metrics, route_lattice,
                        transpile_raw_cavity)

PRESET_GRAPH_SEED = 11
INIT_SCALE = 0.5


@dataclass(frozen=True)
class SpsaConfig:
    iterations: int = 500
    a: float = 0.2
    c: float = 0.1
    stability: float = 50.0
    alpha: float = 0.602
    gamma: float = 0.101
    seed: int = 0


@dataclass
class SpsaResult:
    best_cost: float
    best_params: np.ndarray
    cost_history: list[float]
    evaluations: int


def spsa_minimize(fn, x0, cfg: SpsaConfig, seed: int | None = None) -> SpsaResult:
    """Simultaneous-perturbation stochastic approximation.

    Two evaluations per iteration at x +- c_k * delta with Rademacher delta;
    the gradient estimate is (y+ - y-) / (2 c_k) * delta (delta entries are
    +-1, so elementwise inversion is delta itself). ``cost_history`` records
    the best evaluation observed up to each iteration.
    """
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    x = np.array(x0, dtype=float)
    best_cost = math.inf
    best_params = x.copy()
    history: list[float] = []
    evals = 0
    for k in range(cfg.iterations):
        ak = cfg.a / (cfg.stability + k + 1) ** cfg.alpha
        ck = cfg.c / (k + 1) ** cfg.gamma
        delta = rng.integers(0, 2, size=x.shape).astype(float) * 2.0 - 1.0
        x_plus = x + ck * delta
        x_minus = x - ck * delta
        y_plus = fn(x_plus)
        y_minus = fn(x_minus)
        evals += 2
        for y, xs in ((y_plus, x_plus), (y_minus, x_minus)):
            if y < best_cost:
                best_cost = y
                best_params = xs.copy()
        history.append(best_cost)
        ghat = (y_plus - y_minus) / (2.0 * ck) * delta
        x = x - ak * ghat
    return SpsaResult(best_cost, best_params, history, evals)


# ---------------------------------------------------------------------------
# problem presets
# ---------------------------------------------------------------------------

def three_regular_graph(n: int, seed: int = PRESET_GRAPH_SEED) -> ProblemGraph:
    """Seeded random 3-regular simple graph via the configuration model."""
    if n < 4 or n % 2:
        raise ValueError("3-regular graphs need even n >= 4")
    rng = np.random.default_rng(seed)
    for _ in range(1000):
        stubs = np.repeat(np.arange(n), 3)
        rng.shuffle(stubs)
        edges = set()
        ok = True
        for i in range(0, len(stubs), 2):
            a, b = int(stubs[i]), int(stubs[i + 1])
            if a == b or (min(a, b), max(a, b)) in edges:
                ok = False
                break
            edges.add((min(a, b), max(a, b)))
        if ok:
            return ProblemGraph(n, sorted(edges))
    raise RuntimeError("configuration model failed to produce a simple graph")


def qaoa_preset(n: int) -> ProblemGraph:
    """Shipped problem graphs: seeded 3-regular instances."""
    if n not in (4, 6, 8, 10):
        raise ValueError("presets exist for 4, 6, 8, 10 nodes")
    return three_regular_graph(n, seed=PRESET_GRAPH_SEED)


def vqe_preset(n: int) -> Hamiltonian:
    """Shipped VQE problem: transverse-field Ising on an open line."""
    return transverse_field_ising(n)


# ---------------------------------------------------------------------------
# runners
# ---------------------------------------------------------------------------

@dataclass
class VqaResult:
    kind: str
    architecture: str
    num_qubits: int
    seed: int
    best_cost: float
    exact_optimum: float
    best_params: list[float]
    cost_history: list[float]
    metrics: dict
    makespan: int
    evaluations: int

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "architecture": self.architecture,
            "num_qubits": self.num_qubits,
            "seed": self.seed,
            "best_cost": self.best_cost,
            "exact_optimum": self.exact_optimum,
            "best_params": list(self.best_params),
            "cost_history": list(self.cost_history),
            "metrics": dict(self.metrics),
            "makespan": self.makespan,
            "evaluations": self.evaluations,
        }

    def to_json(self, path: str) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)
            fh.write("\n")


def _stage(circuit, topo: Topology, seed: int):
    if topo.kind == "cavity":
        pc = transpile_raw_cavity(circuit, topo, seed=seed)
    else:
        pc = route_lattice(circuit, topo)
    sched = asap_schedule(pc, GateTimes())
    return pc, sched


def _random_x0(dim: int, seed: int) -> np.ndarray:
    """Seeded initial point. All-zero parameters sit on a stationary point
    of both ansatze (every rotation acts trivially there), where SPSA stalls;
    a small random offset lands in the basin instead."""
    rng = np.random.default_rng(seed)
    return rng.uniform(-INIT_SCALE, INIT_SCALE, dim)


def _qaoa_cavity(graph: ProblemGraph, layers: int, topo: Topology,
                 seed: int):
    """Term-aware cavity build: each cost layer goes through the Pauli-term
    synthesizer (chain/root/mixed forms, reallocation when capture blocks a
    term), mixers ride the single-qubit path."""
    h = maxcut_hamiltonian(graph)
    groupings = partition_for_topology(h, topo, seed=seed)
    tr = CavityTranspiler(topo, groupings)
    for q in range(graph.nodes):
        tr.gate1("h", q)
    for k in range(layers):
        tr.run_terms(h, theta_params=[(2 * k, 1.0)] * len(h.terms))
        for q in range(graph.nodes):
            tr.gate1("rx", q, param=(2 * k + 1, 2.0))
    return tr.finish(optimize=True)


def run_qaoa(graph: ProblemGraph, layers: int, topo: Topology,
             noise: NoiseParams | None = None, cfg: SpsaConfig | None = None,
             seed: int = 0) -> VqaResult:
    """SPSA-trained MaxCut QAOA; cost = <H_cut>, optimum = -max_cut."""
    cfg = cfg or SpsaConfig()
    h = maxcut_hamiltonian(graph)
    if topo.kind == "cavity":
        pc = _qaoa_cavity(graph, layers, topo, seed)
        sched = asap_schedule(pc, GateTimes())
    else:
        ansatz = qaoa_ansatz(graph, layers, parametrized=True)
        pc, sched = _stage(ansatz, topo, seed)

    def cost(params) -> float:
        dm = simulate(pc, noise, params=params, schedule=sched)
        return dm.expectation(h)

    res = spsa_minimize(cost, _random_x0(2 * layers, seed), cfg, seed=seed)
    return VqaResult(
        kind="qaoa", architecture=topo.kind, num_qubits=graph.nodes,
        seed=seed, best_cost=res.best_cost,
        exact_optimum=-float(graph.max_cut()),
        best_params=[float(v) for v in res.best_params],
        cost_history=res.cost_history,
        metrics=count_metrics(pc).to_dict(), makespan=sched.makespan,
        evaluations=res.evaluations)


def run_vqe(h: Hamiltonian, layers: int, topo: Topology,
            noise: NoiseParams | None = None, cfg: SpsaConfig | None = None,
            seed: int = 0) -> VqaResult:
    """SPSA-trained hardware-efficient VQE; cost = <H>, optimum = ground
    energy from dense diagonalization."""
    cfg = cfg or SpsaConfig()
    n = h.num_qubits
    ansatz = hwe_ansatz(n, layers, parametrized=True)
    pc, sched = _stage(ansatz, topo, seed)

    def cost(params) -> float:
        dm = simulate(pc, noise, params=params, schedule=sched)
        return dm.expectation(h)

    res = spsa_minimize(cost, _random_x0(2 * n * layers, seed), cfg, seed=seed)
    return VqaResult(
        kind="vqe", architecture=topo.kind, num_qubits=n, seed=seed,
        best_cost=res.best_cost, exact_optimum=h.ground_energy(),
        best_params=[float(v) for v in res.best_params],
        cost_history=res.cost_history,
        metrics=count_metrics(pc).to_dict(), makespan=sched.makespan,
        evaluations=res.evaluations)


# ---------------------------------------------------------------------------
# seed sweeps (optionally across processes)
# ---------------------------------------------------------------------------

def default_workers() -> int:
    env = os.environ.get("CAVQ_WORKERS")
    if env:
        return max(1, int(env))
    return 1


def _run_one(job) -> dict:
    kind, problem, layers, topo_config, noise_name, cfg, seed = job
    from . import topology as topo_mod
    topo = topo_mod.from_config(topo_config)
    noise = NoiseParams.from_name(noise_name)
    if kind == "qaoa":
        graph = ProblemGraph.from_dict(problem)
        res = run_qaoa(graph, layers, topo, noise, cfg, seed=seed)
    else:
        ham = Hamiltonian.from_dict(problem)
        res = run_vqe(ham, layers, topo, noise, cfg, seed=seed)
    return res.to_dict()


def run_seed_sweep(kind: str, problem, layers: int, topo: Topology,
                   noise_name: str, seeds, cfg: SpsaConfig | None = None,
                   workers: int | None = None) -> list[dict]:
    """Run one VQA config across seeds, fanning out over processes when
    ``workers`` (or CAVQ_WORKERS) is > 1. Results are seed-ordered."""
    cfg = cfg or SpsaConfig()
    problem_dict = problem.to_dict()
    jobs = [(kind, problem_dict, layers, topo.to_config(), noise_name, cfg, s)
            for s in seeds]
    workers = workers or default_workers()
    if workers <= 1 or len(jobs) <= 1:
        return [_run_one(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_one, jobs))
