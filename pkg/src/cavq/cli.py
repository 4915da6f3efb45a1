"""Command-line interface.

    cavq transpile --hamiltonian h.json --topology cavity --out pc.json
    cavq simulate --circuit pc.json --noise default
    cavq vqa qaoa --preset 6 --layers 2 --topology cavity --noise default
    cavq bench-routing --seeds 100 --out-dir results/
    cavq matrix --preset qaoa-grid --out-dir results/matrix
    cavq bench-kernels --qubits 8

Topologies are given as a JSON file path, a sized name like ``cavity:2x11``
(two cavities, eleven modes each), ``honeycomb:3x4`` or ``octagonal:2x2``,
or a bare name (``cavity``/``honeycomb``/``octagonal``) auto-sized to the
workload's qubit count.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import __version__, topology as topo_mod
from .bench import (BenchConfig, bench_kernels, bench_routing,
                    preset_manifest, random_term_suite, run_experiment_matrix,
                    topology_for, write_rows)
from .densim import NoiseParams, simulate
from .pauli import Hamiltonian, ProblemGraph
from .schedule import GateTimes, asap_schedule
from .transpile import PhysicalCircuit, count_metrics, transpile_cavity
from .vqa import SpsaConfig, qaoa_preset, run_qaoa, run_vqe, vqe_preset

NOISE_NAMES = ("default", "companion", "none", "noiseless")


def parse_topology(spec: str, num_qubits: int | None = None):
    if os.path.exists(spec):
        return topo_mod.from_json(spec)
    name, _, dims = spec.partition(":")
    if dims:
        a, b = (int(v) for v in dims.split("x"))
        builders = {"cavity": topo_mod.build_cavity,
                    "honeycomb": topo_mod.build_honeycomb,
                    "octagonal": topo_mod.build_octagonal}
        if name not in builders:
            raise click.BadParameter(f"unknown topology kind {name!r}")
        return builders[name](a, b)
    if num_qubits is None:
        raise click.BadParameter(
            f"bare topology name {name!r} needs a qubit count to auto-size")
    return topology_for(name, num_qubits)


def parse_int_list(text: str) -> list[int]:
    """Accept '0,3,5' or inclusive ranges '0..9' / '6..22:2'."""
    if ".." in text:
        lo, _, rest = text.partition("..")
        hi, _, step = rest.partition(":")
        return list(range(int(lo), int(hi) + 1, int(step or 1)))
    return [int(v) for v in text.split(",")]


def _write_json(data: dict, out: str | None) -> None:
    text = json.dumps(data, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


@click.group()
@click.version_option(__version__)
@click.option("--seed", default=0, show_default=True,
              help="Default seed for subcommands that do not set one.")
@click.option("--workers", default=None, type=int,
              help="Worker processes (default: CAVQ_WORKERS or 1).")
@click.option("--out-dir", default=".", show_default=True,
              help="Default output directory.")
@click.pass_context
def main(ctx, seed, workers, out_dir):
    """Cavity-centric transpiler and noisy-simulation toolkit."""
    if workers is None:
        workers = int(os.environ.get("CAVQ_WORKERS", "1"))
    ctx.obj = {"seed": seed, "workers": max(1, workers), "out_dir": out_dir}


def _default_seed(ctx, seed):
    return ctx.obj["seed"] if seed is None else seed


@main.command()
@click.option("--hamiltonian", type=click.Path(exists=True),
              help="Hamiltonian JSON file.")
@click.option("--random", "random_spec", metavar="QUBITS,TERMS",
              help="Generate a random term suite instead.")
@click.option("--topology", required=True, help="Topology file or name.")
@click.option("--thetas", help="Comma-separated per-term angles "
                               "(default 0.1 each).")
@click.option("--out", type=click.Path(), help="Physical-circuit JSON path.")
@click.option("--metrics", "metrics_out", type=click.Path(),
              help="Write routing metrics as a one-row CSV.")
@click.option("--emit-schedule", type=click.Path(),
              help="Write the ASAP schedule JSON.")
@click.option("--no-optimize", is_flag=True, help="Skip SWAP cancellation.")
@click.option("--seed", default=None, type=int)
@click.pass_context
def transpile(ctx, hamiltonian, random_spec, topology, thetas, out,
              metrics_out, emit_schedule, no_optimize, seed):
    """Transpile a Pauli-term Hamiltonian onto an architecture."""
    seed = _default_seed(ctx, seed)
    if bool(hamiltonian) == bool(random_spec):
        raise click.UsageError("need exactly one of --hamiltonian/--random")
    if hamiltonian:
        h = Hamiltonian.from_json(hamiltonian)
    else:
        q, t = (int(v) for v in random_spec.split(","))
        h = random_term_suite(q, t, seed)
    angles = ([float(v) for v in thetas.split(",")] if thetas
              else [0.1] * len(h.terms))
    if len(angles) != len(h.terms):
        raise click.UsageError(f"need {len(h.terms)} angles")
    topo = parse_topology(topology, h.num_qubits)
    if topo.kind == "cavity":
        pc = transpile_cavity(h, topo, thetas=angles, seed=seed,
                              optimize=not no_optimize)
    else:
        from .circuits import trotter_circuit
        from .transpile import route_lattice
        pc = route_lattice(trotter_circuit(h, angles), topo)
    if out:
        pc.to_json(out)
    m = count_metrics(pc)
    sched = asap_schedule(pc, GateTimes())
    if metrics_out:
        import csv as _csv
        with open(metrics_out, "w", newline="") as fh:
            w = _csv.writer(fh)
            w.writerow(["cx", "one_qubit", "swap_io", "swap_route", "depth",
                        "total_gates", "routing_overhead", "duration_ns"])
            w.writerow([m.cx_count, m.one_qubit_count, m.swap_io_count,
                        m.swap_route_count, m.depth, m.total_gates,
                        m.routing_overhead, sched.makespan])
    if emit_schedule:
        sched.to_json(emit_schedule)
    click.echo(f"{topo.kind}: {m.total_gates} gates, depth {m.depth}, "
               f"overhead {m.routing_overhead}, makespan {sched.makespan} ns"
               + (f" -> {out}" if out else ""))


@main.command("simulate")
@click.option("--circuit", required=True, type=click.Path(exists=True),
              help="Physical-circuit JSON (bound angles).")
@click.option("--noise", default="default", show_default=True,
              type=click.Choice(NOISE_NAMES))
@click.option("--hold", default=0.0, show_default=True,
              help="Extra idle time (ns) appended after the last gate.")
@click.option("--top-k", default=8, show_default=True,
              help="Number of outcome probabilities to report.")
@click.option("--expect", type=click.Path(exists=True),
              help="Hamiltonian JSON; adds its expectation value.")
@click.option("--out", type=click.Path())
def simulate_cmd(circuit, noise, hold, top_k, expect, out):
    """Run the density-matrix simulator on a transpiled circuit."""
    pc = PhysicalCircuit.from_json(circuit)
    dm = simulate(pc, NoiseParams.from_name(noise), hold=hold)
    expectation = None
    if expect:
        expectation = dm.expectation(Hamiltonian.from_json(expect))
    _write_json({
        "probabilities": dm.probabilities(top_k),
        "expectation": expectation,
        "trace_error": dm.trace_error(),
    }, out)


@main.group()
def vqa():
    """Variational drivers (SPSA over the noisy simulator)."""


def _vqa_common(fn):
    for opt in (
        click.option("--layers", default=2, show_default=True),
        click.option("--topology", required=True),
        click.option("--noise", default="default", show_default=True,
                     type=click.Choice(NOISE_NAMES)),
        click.option("--iters", default=500, show_default=True),
        click.option("--seed", default=None, type=int),
        click.option("--seeds", default=None,
                     help="Seed list ('0,1,2' or '0..9') for a sweep."),
        click.option("--out", type=click.Path()),
    ):
        fn = opt(fn)
    return fn


def _run_vqa_command(ctx, kind, problem, layers, topology, noise, iters,
                     seed, seeds, out):
    n = problem.nodes if kind == "qaoa" else problem.num_qubits
    topo = parse_topology(topology, n)
    cfg = SpsaConfig(iterations=iters)
    if seeds:
        from .vqa import run_seed_sweep
        results = run_seed_sweep(kind, problem, layers, topo, noise,
                                 parse_int_list(seeds), cfg,
                                 workers=ctx.obj["workers"])
        best = [r["best_cost"] for r in results]
        _write_json({"results": results}, out)
        click.echo(f"{kind} {topo.kind}: {len(best)} seeds, "
                   f"mean best {sum(best) / len(best):.6f}")
        return
    seed = _default_seed(ctx, seed)
    noise_params = NoiseParams.from_name(noise)
    if kind == "qaoa":
        res = run_qaoa(problem, layers, topo, noise_params, cfg, seed=seed)
    else:
        res = run_vqe(problem, layers, topo, noise_params, cfg, seed=seed)
    _write_json(res.to_dict(), out)
    click.echo(f"{kind} {topo.kind} seed {seed}: best {res.best_cost:.6f} "
               f"(optimum {res.exact_optimum:.6f})")


@vqa.command("qaoa")
@click.option("--graph", type=click.Path(exists=True),
              help="Problem graph JSON.")
@click.option("--preset", type=int,
              help="Shipped 3-regular graph size (4/6/8/10).")
@_vqa_common
@click.pass_context
def vqa_qaoa(ctx, graph, preset, layers, topology, noise, iters, seed,
             seeds, out):
    """MaxCut QAOA."""
    if bool(graph) == bool(preset):
        raise click.UsageError("need exactly one of --graph/--preset")
    problem = (ProblemGraph.from_json(graph) if graph
               else qaoa_preset(preset))
    _run_vqa_command(ctx, "qaoa", problem, layers, topology, noise, iters,
                     seed, seeds, out)


@vqa.command("vqe")
@click.option("--hamiltonian", type=click.Path(exists=True),
              help="Hamiltonian JSON.")
@click.option("--preset", type=int,
              help="Transverse-field Ising line length.")
@_vqa_common
@click.pass_context
def vqa_vqe(ctx, hamiltonian, preset, layers, topology, noise, iters, seed,
            seeds, out):
    """Hardware-efficient VQE."""
    if bool(hamiltonian) == bool(preset):
        raise click.UsageError("need exactly one of --hamiltonian/--preset")
    problem = (Hamiltonian.from_json(hamiltonian) if hamiltonian
               else vqe_preset(preset))
    _run_vqa_command(ctx, "vqe", problem, layers, topology, noise, iters,
                     seed, seeds, out)


@main.command("bench-routing")
@click.option("--qubits", default="6..22:2", show_default=True)
@click.option("--terms", default="5..30", show_default=True)
@click.option("--seeds", default=100, show_default=True)
@click.option("--arch", multiple=True,
              default=("cavity", "honeycomb"), show_default=True)
@click.option("--base-seed", default=None, type=int)
@click.option("--out-dir", default=None, type=click.Path())
@click.pass_context
def bench_routing_cmd(ctx, qubits, terms, seeds, arch, base_seed, out_dir):
    """Routing-overhead benchmark across architectures."""
    lo, hi = (int(v) for v in terms.split(".."))
    cfg = BenchConfig(qubit_range=tuple(parse_int_list(qubits)),
                      terms_range=(lo, hi), seeds=seeds,
                      architectures=tuple(arch),
                      base_seed=_default_seed(ctx, base_seed))
    rows, summary = bench_routing(cfg)
    out_dir = out_dir or ctx.obj["out_dir"]
    os.makedirs(out_dir, exist_ok=True)
    write_rows(rows, os.path.join(out_dir, "routing.csv"))
    _write_json(summary, os.path.join(out_dir, "routing_summary.json"))
    click.echo(f"{len(rows)} rows -> {out_dir}/routing.csv")
    for a in cfg.architectures:
        exp = summary["growth_exponent"][a]
        click.echo(f"  {a}: growth exponent {exp:.3f}")


@main.command("matrix")
@click.option("--manifest", type=click.Path(exists=True))
@click.option("--preset",
              type=click.Choice(["qaoa-grid", "full-sweep",
                                 "depth-sweep", "smoke"]))
@click.option("--seeds", default="0", show_default=True)
@click.option("--iters", default=500, show_default=True)
@click.option("--out-dir", default=None, type=click.Path())
@click.pass_context
def matrix_cmd(ctx, manifest, preset, seeds, iters, out_dir):
    """Run a VQA experiment matrix from a manifest or preset."""
    if bool(manifest) == bool(preset):
        raise click.UsageError("need exactly one of --manifest/--preset")
    if manifest:
        with open(manifest) as fh:
            m = json.load(fh)
    else:
        m = preset_manifest(preset, seeds=parse_int_list(seeds),
                            iterations=iters)
    out_dir = out_dir or os.path.join(ctx.obj["out_dir"], "matrix")
    record = run_experiment_matrix(m, out_dir, workers=ctx.obj["workers"])
    failed = [k for k, v in record["status"].items() if v != "ok"]
    click.echo(f"{len(record['status'])} cells -> {out_dir}"
               + (f" ({len(failed)} failed)" if failed else ""))
    if failed:
        for k in failed:
            click.echo(f"  {k}: {record['status'][k]}", err=True)
        sys.exit(1)


@main.command("bench-kernels")
@click.option("--qubits", default=8, show_default=True)
@click.option("--repeats", default=200, show_default=True)
@click.option("--seed", default=None, type=int)
@click.option("--out", type=click.Path())
@click.pass_context
def bench_kernels_cmd(ctx, qubits, repeats, seed, out):
    """Compare the compiled and NumPy simulation kernels."""
    report = bench_kernels(qubits, repeats, _default_seed(ctx, seed))
    _write_json(report, out)
    if "speedup" in report:
        parts = ", ".join(f"{k} {v:.2f}x" for k, v in report["speedup"].items())
        click.echo(f"compiled vs numpy: {parts}")
    else:
        click.echo("compiled backend not built; numpy timings only")


if __name__ == "__main__":
    main()
