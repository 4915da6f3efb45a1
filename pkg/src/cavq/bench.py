"""Random-workload generators, routing benchmarks, and experiment matrices.

The routing benchmark draws paired workloads — the same random Hamiltonian is
transpiled onto every architecture in a cell — and reports per-row metrics as
CSV plus per-qubit-count means and a fitted growth exponent as JSON. The
experiment matrix runs VQA cells from a manifest and is deterministic enough
to reproduce its aggregate CSV byte-for-byte on rerun.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .pauli import Hamiltonian, PauliTerm
from .schedule import GateTimes, asap_schedule, idle_report
from .topology import Topology, cavity_for, from_config, honeycomb_for, octagonal_for
from .transpile import count_metrics, route_lattice, transpile_cavity
from .vqa import SpsaConfig, qaoa_preset, run_qaoa, run_vqe, vqe_preset

CSV_HEADER = ["arch", "qubits", "terms", "seed", "cx", "swap_io",
              "swap_route", "depth", "duration_ns", "idle_ns"]

AXES = "XYZ"


def stable_seed(key: str) -> int:
    """Platform-stable 63-bit seed from a string key (hash() is salted)."""
    digest = hashlib.sha256(key.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def random_term_suite(n_qubits: int, n_terms: int, seed: int,
                      arities=(2, 3, 4)) -> Hamiltonian:
    """Random Pauli-term workload: each term draws an arity from ``arities``
    (clipped to n_qubits), that many distinct qubits, and uniform X/Y/Z axes;
    coefficients are 1.0."""
    if n_qubits < 2:
        raise ValueError("need at least 2 qubits")
    rng = random.Random(seed)
    usable = [a for a in arities if a <= n_qubits]
    terms = []
    for _ in range(n_terms):
        m = rng.choice(usable)
        qubits = rng.sample(range(n_qubits), m)
        s = ["I"] * n_qubits
        for q in qubits:
            s[q] = rng.choice(AXES)
        terms.append(PauliTerm("".join(s), 1.0))
    return Hamiltonian(n_qubits, terms)


# ---------------------------------------------------------------------------
# routing benchmark
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BenchConfig:
    qubit_range: tuple[int, ...] = tuple(range(6, 23, 2))
    terms_range: tuple[int, int] = (5, 30)
    seeds: int = 100
    architectures: tuple[str, ...] = ("cavity", "honeycomb")
    base_seed: int = 0
    arities: tuple[int, ...] = (2, 3, 4)

    def __post_init__(self):
        if not self.qubit_range or self.seeds < 1:
            raise ValueError("empty qubit range or no seeds")
        lo, hi = self.terms_range
        if lo < 1 or hi < lo:
            raise ValueError("bad terms range")


def topology_for(arch: str, num_qubits: int) -> Topology:
    if arch == "cavity":
        return cavity_for(num_qubits)
    if arch == "honeycomb":
        return honeycomb_for(num_qubits)
    if arch == "octagonal":
        return octagonal_for(num_qubits)
    raise ValueError(f"unknown architecture {arch!r}")


def _payload_cx(h: Hamiltonian) -> int:
    """CX count of the bare entangling skeleton: 2*(m-1) per m-qubit term."""
    return sum(2 * (t.weight() - 1) for t in h.terms)


def _bench_row(arch: str, h: Hamiltonian, qubits: int, terms: int,
               seed_index: int, cell_seed: int) -> tuple[list, int]:
    topo = topology_for(arch, qubits)
    if topo.kind == "cavity":
        pc = transpile_cavity(h, topo, thetas=[0.1] * len(h.terms),
                              seed=cell_seed)
    else:
        from .circuits import trotter_circuit
        pc = route_lattice(trotter_circuit(h, [0.1] * len(h.terms)), topo)
    metrics = count_metrics(pc)
    sched = asap_schedule(pc, GateTimes())
    idle = sum(idle_report(sched).idle.values())
    row = [arch, qubits, terms, seed_index, metrics.cx_count,
           metrics.swap_io_count, metrics.swap_route_count, metrics.depth,
           sched.makespan, idle]
    return row, metrics.routing_overhead


def _fit_exponent(sizes, values) -> float:
    """Least-squares slope of log(value) vs log(size)."""
    if len(sizes) < 2:
        return float("nan")
    xs = np.log(np.asarray(sizes, dtype=float))
    ys = np.log(np.maximum(np.asarray(values, dtype=float), 1e-9))
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)


def bench_routing(cfg: BenchConfig | None = None) -> tuple[list[list], dict]:
    """Run the routing benchmark; returns (csv_rows, summary).

    One workload per (qubits, seed) with the term count drawn from
    terms_range; every architecture transpiles the same workload. Summary
    holds per-(arch, qubits) means of appended routing gates and a fitted
    log-log growth exponent per architecture.
    """
    cfg = cfg or BenchConfig()
    lo, hi = cfg.terms_range
    rows: list[list] = []
    overhead: dict[tuple[str, int], list[int]] = {}
    for qubits in cfg.qubit_range:
        for s in range(cfg.seeds):
            key = f"{cfg.base_seed}:{qubits}:{s}"
            wl_rng = random.Random(stable_seed(key))
            terms = wl_rng.randint(lo, hi)
            h = random_term_suite(qubits, terms, stable_seed(key + ":suite"),
                                  arities=cfg.arities)
            for arch in cfg.architectures:
                row, appended = _bench_row(arch, h, qubits, terms, s,
                                           stable_seed(key + ":" + arch))
                rows.append(row)
                overhead.setdefault((arch, qubits), []).append(appended)
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    summary: dict = {"appended_mean": {}, "growth_exponent": {}}
    for arch in cfg.architectures:
        means = {q: float(np.mean(overhead[(arch, q)]))
                 for q in cfg.qubit_range}
        summary["appended_mean"][arch] = {str(q): means[q] for q in means}
        summary["growth_exponent"][arch] = _fit_exponent(
            list(means), [means[q] for q in means])
    return rows, summary


def write_rows(rows: list[list], path: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        w.writerows(rows)


def rows_to_csv_bytes(rows: list[list]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(CSV_HEADER)
    w.writerows(rows)
    return buf.getvalue().encode()


# ---------------------------------------------------------------------------
# experiment matrix
# ---------------------------------------------------------------------------

MATRIX_CSV_HEADER = ["cell", "kind", "nodes", "layers", "arch", "noise",
                     "seed", "best_cost", "exact_optimum", "makespan",
                     "evaluations"]


def preset_manifest(name: str, seeds=(0,), iterations: int = 500) -> dict:
    """Named experiment matrices.

    qaoa-grid: 4 sizes x 2 layer counts x 2 architectures (16 cells).
    full-sweep: the qaoa-grid cells plus 2-layer VQE at 8 qubits.
    depth-sweep: QAOA p in {3..6} over sizes {4..10}.
    smoke: one tiny cell for fast determinism checks.
    """
    def qaoa_cells(sizes, layer_counts, archs):
        return [{"kind": "qaoa", "nodes": n, "layers": p, "arch": a,
                 "noise": "default"}
                for n in sizes for p in layer_counts for a in archs]

    archs = ["cavity", "honeycomb"]
    if name == "qaoa-grid":
        cells = qaoa_cells((4, 6, 8, 10), (2, 4), archs)
    elif name == "full-sweep":
        cells = qaoa_cells((4, 6, 8, 10), (2, 4), archs)
        cells += [{"kind": "vqe", "nodes": 8, "layers": 2, "arch": a,
                   "noise": "default"} for a in archs]
    elif name == "depth-sweep":
        cells = qaoa_cells((4, 6, 8, 10), (3, 4, 5, 6), archs)
    elif name == "smoke":
        cells = qaoa_cells((4,), (1,), archs)
        iterations = min(iterations, 10)
    else:
        raise ValueError(f"unknown preset {name!r}")
    for c in cells:
        c["cell"] = f"{c['kind']}-n{c['nodes']}-l{c['layers']}-{c['arch']}"
    return {"name": name, "version": __version__,
            "seeds": list(seeds), "iterations": iterations, "cells": cells}


def _run_cell(args) -> tuple[str, list[dict], str]:
    cell, seeds, iterations = args
    try:
        topo = topology_for(cell["arch"], cell["nodes"])
        from .densim import NoiseParams
        noise = NoiseParams.from_name(cell["noise"])
        cfg = SpsaConfig(iterations=iterations)
        results = []
        for s in seeds:
            if cell["kind"] == "qaoa":
                r = run_qaoa(qaoa_preset(cell["nodes"]), cell["layers"],
                             topo, noise, cfg, seed=s)
            elif cell["kind"] == "vqe":
                r = run_vqe(vqe_preset(cell["nodes"]), cell["layers"],
                            topo, noise, cfg, seed=s)
            else:
                raise ValueError(f"unknown cell kind {cell['kind']!r}")
            results.append(r.to_dict())
        return cell["cell"], results, "ok"
    except Exception as exc:  # noqa: BLE001 - cell failures become rows
        return cell["cell"], [], f"failed: {exc}"


def run_experiment_matrix(manifest: dict, out_dir: str,
                          workers: int = 1) -> dict:
    """Execute a matrix manifest into ``out_dir``.

    Writes cells/<id>.json per cell, aggregate.csv ordered by (cell, seed),
    and manifest.json recording configuration, tool version, and per-cell
    status — enough to re-run bit-identically.
    """
    os.makedirs(os.path.join(out_dir, "cells"), exist_ok=True)
    seeds = manifest.get("seeds", [0])
    iterations = manifest.get("iterations", 500)
    cells = sorted(manifest.get("cells", []), key=lambda c: c["cell"])
    jobs = [(c, seeds, iterations) for c in cells]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_cell, jobs))
    else:
        outcomes = [_run_cell(j) for j in jobs]

    status: dict[str, str] = {}
    csv_rows: list[list] = []
    by_cell = {c["cell"]: c for c in cells}
    for cell_id, results, state in outcomes:
        status[cell_id] = state
        cell = by_cell[cell_id]
        with open(os.path.join(out_dir, "cells", f"{cell_id}.json"), "w") as fh:
            json.dump({"cell": cell, "status": state, "results": results},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        for r in results:
            csv_rows.append([cell_id, cell["kind"], cell["nodes"],
                             cell["layers"], cell["arch"], cell["noise"],
                             r["seed"], repr(r["best_cost"]),
                             repr(r["exact_optimum"]), r["makespan"],
                             r["evaluations"]])
    csv_rows.sort(key=lambda r: (r[0], r[6]))
    with open(os.path.join(out_dir, "aggregate.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(MATRIX_CSV_HEADER)
        w.writerows(csv_rows)
    record = {"manifest": manifest, "tool_version": __version__,
              "status": {k: status[k] for k in sorted(status)}}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return record


# ---------------------------------------------------------------------------
# kernel micro-benchmark
# ---------------------------------------------------------------------------

def bench_kernels(num_qubits: int = 8, repeats: int = 200,
                  seed: int = 0) -> dict:
    """Time the density/statevector kernels on both backends.

    Measures a CX sweep, a 1q-unitary sweep, and a decay sweep over a random
    density matrix, per backend. Returns nanosecond-per-op timings; the
    compiled backend entry is absent when the extension is not built.
    """
    from . import kernels

    rng = np.random.default_rng(seed)
    dim = 1 << num_qubits
    base = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    base = base @ base.conj().T
    base /= np.trace(base).real
    theta = 0.7
    u = np.array([[np.cos(theta), -1j * np.sin(theta)],
                  [-1j * np.sin(theta), np.cos(theta)]], dtype=complex)

    def run(backend) -> dict:
        rho = base.copy()
        out: dict[str, float] = {}
        for name, op in (
            ("cx", lambda r, q: backend.rho_apply_cx(r, num_qubits, q,
                                                     (q + 1) % num_qubits)),
            ("u1q", lambda r, q: backend.rho_apply_1q(r, u, num_qubits, q)),
            ("decay", lambda r, q: backend.rho_decay(r, 0.01, 0.99,
                                                     num_qubits, q)),
        ):
            t0 = time.perf_counter()
            for i in range(repeats):
                rho = op(rho, i % num_qubits)
            out[name] = (time.perf_counter() - t0) / repeats * 1e9
        return out

    report = {"num_qubits": num_qubits, "repeats": repeats,
              "backends": {"numpy": run(kernels.numpy_backend())}}
    compiled = kernels.compiled_backend()
    if compiled is not None:
        report["backends"]["compiled"] = run(compiled)
        report["speedup"] = {
            k: report["backends"]["numpy"][k] / report["backends"]["compiled"][k]
            for k in report["backends"]["numpy"]}
    return report
