"""Routing benchmark, experiment matrix, and kernel timing reports."""
import csv
import hashlib
import io
import json
import statistics

import numpy as np
import pytest

from cavq.bench import (CSV_HEADER, MATRIX_CSV_HEADER, BenchConfig,
                        _fit_exponent, bench_kernels, bench_routing,
                        preset_manifest, random_term_suite,
                        run_experiment_matrix, rows_to_csv_bytes, stable_seed,
                        topology_for, write_rows)


def test_stable_seed_is_not_salted():
    # hash() is randomized per process; these must survive interpreter
    # restarts, so the values themselves are the contract
    assert stable_seed("x") == 2474749279504906390
    assert stable_seed("routing:6:0") == 3326617777759736567
    assert stable_seed("x") != stable_seed("y")


def test_random_term_suite_deterministic():
    a = random_term_suite(6, 9, seed=4)
    b = random_term_suite(6, 9, seed=4)
    assert [t.pauli for t in a.terms] == [t.pauli for t in b.terms]
    c = random_term_suite(6, 9, seed=5)
    assert [t.pauli for t in a.terms] != [t.pauli for t in c.terms]


def test_random_term_suite_arities():
    h = random_term_suite(22, 400, seed=0)
    ws = [t.weight() for t in h.terms]
    assert set(ws) <= {2, 3, 4}
    assert abs(statistics.mean(ws) - 3.0) < 0.1
    for t in h.terms:
        actives = t.active_qubits()
        assert len(set(actives)) == len(actives)
        assert all(t.axis(q) in "XYZ" for q in actives)
    # arity clips to the qubit count on tiny registers
    tiny = random_term_suite(3, 20, seed=1)
    assert max(t.weight() for t in tiny.terms) <= 3


def test_topology_for():
    assert topology_for("cavity", 8).kind == "cavity"
    assert topology_for("honeycomb", 8).kind == "honeycomb"
    assert topology_for("octagonal", 8).kind == "octagonal"
    for arch in ("cavity", "honeycomb", "octagonal"):
        assert topology_for(arch, 8).num_resources >= 8
    with pytest.raises(ValueError):
        topology_for("torus", 8)


def test_fit_exponent_recovers_power_law():
    qubits = [6, 8, 10, 12]
    means = [2.0 * q ** 1.3 for q in qubits]
    assert _fit_exponent(qubits, means) == pytest.approx(1.3, abs=1e-9)


def test_bench_routing_small():
    cfg = BenchConfig(qubit_range=(4, 6), terms_range=(3, 6), seeds=3)
    rows, summary = bench_routing(cfg)
    assert len(rows) == 2 * 2 * 3  # arch x qubit sizes x seeds
    for row in rows:
        assert len(row) == len(CSV_HEADER)
        arch, q, terms, seed = row[0], row[1], row[2], row[3]
        assert arch in ("cavity", "honeycomb")
        assert 3 <= terms <= 6
        assert all(isinstance(v, int) for v in row[1:])
    # the same (qubits, seed) cell draws the same Hamiltonian for each arch
    by_cell = {}
    for row in rows:
        by_cell.setdefault((row[1], row[3]), []).append(row[2])
    assert all(len(set(v)) == 1 for v in by_cell.values())
    assert set(summary["appended_mean"]) == {"cavity", "honeycomb"}
    assert set(summary["growth_exponent"]) == {"cavity", "honeycomb"}


def test_bench_routing_rerun_identical():
    cfg = BenchConfig(qubit_range=(4,), terms_range=(3, 5), seeds=2)
    a = rows_to_csv_bytes(bench_routing(cfg)[0])
    b = rows_to_csv_bytes(bench_routing(cfg)[0])
    assert a == b
    reader = csv.reader(io.StringIO(a.decode()))
    assert next(reader) == CSV_HEADER


def test_write_rows(tmp_path):
    cfg = BenchConfig(qubit_range=(4,), terms_range=(3, 5), seeds=1)
    rows, _ = bench_routing(cfg)
    path = tmp_path / "routing.csv"
    write_rows(rows, str(path))
    assert path.read_bytes() == rows_to_csv_bytes(rows)


# ---------------------------------------------------------------------------
# experiment matrix
# ---------------------------------------------------------------------------

def test_preset_manifest_shapes():
    assert len(preset_manifest("qaoa-grid")["cells"]) == 16
    assert len(preset_manifest("full-sweep")["cells"]) == 18
    assert len(preset_manifest("depth-sweep")["cells"]) == 32
    smoke = preset_manifest("smoke", seeds=(0,), iterations=10)
    assert len(smoke["cells"]) == 2
    ids = [c["cell"] for c in smoke["cells"]]
    assert ids == ["qaoa-n4-l1-cavity", "qaoa-n4-l1-honeycomb"]
    with pytest.raises(ValueError):
        preset_manifest("unknown")


def test_matrix_smoke_run_and_rerun(tmp_path):
    man = preset_manifest("smoke", seeds=(0,), iterations=10)
    digests = []
    for sub in ("a", "b"):
        out_dir = tmp_path / sub
        status = run_experiment_matrix(man, str(out_dir), workers=1)
        assert all(v == "ok" for v in status["status"].values())
        agg = (out_dir / "aggregate.csv").read_bytes()
        digests.append(hashlib.sha256(agg).hexdigest())
        reader = csv.reader(io.StringIO(agg.decode()))
        assert next(reader) == MATRIX_CSV_HEADER
        body = list(reader)
        assert len(body) == 2  # one seed per cell
        cells = out_dir / "cells"
        for cell in man["cells"]:
            payload = json.loads((cells / f"{cell['cell']}.json").read_text())
            assert payload["status"] == "ok"
            assert payload["results"][0]["seed"] == 0
            assert len(payload["results"][0]["cost_history"]) == 10
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["manifest"] == man
    assert digests[0] == digests[1]


def test_matrix_csv_floats_are_reprs(tmp_path):
    man = preset_manifest("smoke", seeds=(0,), iterations=10)
    out_dir = tmp_path / "m"
    run_experiment_matrix(man, str(out_dir), workers=1)
    reader = csv.reader(io.StringIO(
        (out_dir / "aggregate.csv").read_text()))
    next(reader)
    for row in reader:
        cost = float(row[MATRIX_CSV_HEADER.index("best_cost")])
        assert repr(cost) == row[MATRIX_CSV_HEADER.index("best_cost")]


# ---------------------------------------------------------------------------
# kernel micro-benchmark
# ---------------------------------------------------------------------------

def test_bench_kernels_report():
    rep = bench_kernels(num_qubits=4, repeats=3, seed=0)
    assert set(rep) >= {"backends", "speedup"}
    assert "numpy" in rep["backends"]
    for timings in rep["backends"].values():
        assert set(timings) == {"cx", "u1q", "decay"}
        assert all(v > 0 for v in timings.values())
    if "cython" in rep["backends"]:
        assert set(rep["speedup"]) == {"cx", "u1q", "decay"}
