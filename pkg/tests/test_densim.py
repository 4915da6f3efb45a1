"""T1/T2 channel math and the timed density-matrix simulator."""
import math
import random

import numpy as np
import pytest

from cavq.circuits import Gate, LogicalCircuit, ghz_circuit
from cavq.densim import (DensityMatrix, NoiseParams, apply_decay,
                         decay_factors, dephasing_lambda, expectation,
                         fidelity_states, kraus_completeness_residual,
                         kraus_decay, simulate, simulate_pure, statevector)
from cavq.partition import Groupings
from cavq.pauli import Hamiltonian, PauliTerm
from cavq.topology import build_cavity, build_honeycomb
from cavq.transpile import PhysicalCircuit, PhysicalGate, transpile_raw_cavity

US = 1_000.0
MS = 1_000_000.0


def lattice_pc(gates, n, topo=None):
    topo = topo or build_honeycomb(2, 2)
    placement = list(range(n))
    return PhysicalCircuit(topo, n, gates, placement, list(placement))


def random_density(n, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


# ---------------------------------------------------------------------------
# channel math
# ---------------------------------------------------------------------------

def test_decay_factors_analytic():
    gamma, eta = decay_factors(250.0 * US, 250.0 * US, 250.0 * US)
    assert abs(gamma - (1.0 - math.exp(-1.0))) < 1e-12
    assert abs(eta - math.exp(-1.0)) < 1e-12
    for t in (0.0, 17.0, 4000.0):
        _, eta = decay_factors(t, math.inf, 30.0 * MS)
        assert abs(eta - math.exp(-t / (30.0 * MS))) < 1e-12
    assert decay_factors(1e9, math.inf, math.inf) == (0.0, 1.0)


def test_dephasing_lambda():
    # T2 = 2*T1 means damping supplies all the dephasing
    assert dephasing_lambda(123.0, 100.0, 200.0) == 0.0
    # pure dephasing when T1 is infinite: lam = 1 - exp(-t/T2)
    lam = dephasing_lambda(50.0, math.inf, 100.0)
    assert abs(lam - (1.0 - math.exp(-0.5))) < 1e-12


@pytest.mark.parametrize("gamma", [0.0, 0.05, 0.3, 0.9, 1.0])
@pytest.mark.parametrize("lam", [0.0, 0.1, 0.7, 1.0])
def test_kraus_completeness(gamma, lam):
    assert kraus_completeness_residual(kraus_decay(gamma, lam)) < 1e-14


@pytest.mark.parametrize("t,t1,t2", [
    (40.0, 250.0 * US, 250.0 * US),
    (300.0, 100.0 * US, 50.0 * US),
    (5000.0, 0.1 * MS, 0.1 * MS),
])
def test_fused_update_matches_kraus(t, t1, t2):
    # the in-place (gamma, eta) update must equal the two-channel Kraus map
    gamma, _ = decay_factors(t, t1, t2)
    lam = dephasing_lambda(t, t1, t2)
    ks = kraus_decay(gamma, lam)
    for seed in range(3):
        rho = random_density(1, seed)
        ref = sum(k @ rho @ k.conj().T for k in ks)
        got = apply_decay(rho, t, t1, t2)
        assert np.abs(got - ref).max() < 1e-12


def test_decay_semigroup():
    rho = random_density(2, seed=5)
    t1, t2 = 180.0 * US, 90.0 * US
    once = apply_decay(apply_decay(rho, 30.0, t1, t2, qubit=1),
                       70.0, t1, t2, qubit=1)
    joint = apply_decay(rho, 100.0, t1, t2, qubit=1)
    assert np.abs(once - joint).max() < 1e-12


def test_ground_state_is_fixpoint():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1.0
    for q in (0, 1):
        rho = apply_decay(rho, 1e9, 100.0, 100.0, qubit=q)
    assert rho[0, 0] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# noise presets
# ---------------------------------------------------------------------------

def test_preset_rates():
    d = NoiseParams.default()
    assert d.rates_for(False) == (250.0 * US, 250.0 * US)
    assert d.rates_for(True) == (30.0 * MS, 30.0 * MS)
    c = NoiseParams.companion()
    assert c.rates_for(False) == (0.1 * MS, 0.1 * MS)
    assert c.rates_for(True) == (1.0 * MS, 1.0 * MS)
    assert NoiseParams.noiseless().is_noiseless
    assert NoiseParams.from_name("none") == NoiseParams.from_name("noiseless")
    with pytest.raises(ValueError):
        NoiseParams.from_name("loud")


def test_noise_validation():
    with pytest.raises(ValueError):
        NoiseParams(transmon_t1=-1.0)
    with pytest.raises(ValueError):
        NoiseParams(transmon_t1=100.0, transmon_t2=201.0)  # T2 > 2*T1


# ---------------------------------------------------------------------------
# timed simulation
# ---------------------------------------------------------------------------

def test_excited_state_relaxes_by_e():
    # X preparation decays nothing (|0> is a fixpoint), then a hold of
    # exactly T1 leaves population e^-1
    t1 = 250.0 * US
    pc = lattice_pc([PhysicalGate("x", (0,))], 1)
    dm = simulate(pc, NoiseParams.default(), hold=t1)
    assert abs(dm.rho[1, 1].real - math.exp(-1.0)) < 1e-9
    assert dm.trace_error() < 1e-12


def test_plus_state_coherence_decays_at_t2():
    t2 = 250.0 * US
    hold = 0.37 * t2
    pc = lattice_pc([PhysicalGate("h", (0,))], 1)
    dm = simulate(pc, NoiseParams.default(), hold=hold)
    # T1 relaxation also moves the off-diagonal term's anchor populations,
    # but the coherence itself scales by exactly exp(-t/T2)
    assert abs(abs(dm.rho[0, 1]) - 0.5 * math.exp(-hold / t2)) < 1e-9


def test_cavity_mode_holds_longer():
    # cavity circuit: the qubit is fetched to the transmon for the gate and
    # stored back; the hold then decays at cavity rates
    topo = build_cavity(1, 1)
    circ = LogicalCircuit(1, [Gate("x", (0,))])
    pc = transpile_raw_cavity(circ, topo, groupings=Groupings([0], [1]))
    assert [g.kind for g in pc.gates] == ["swap_out", "x", "swap_in"]
    hold = 1.0 * MS
    dm = simulate(pc, NoiseParams.default(), hold=hold)
    # one 100 ns swap_in window at transmon rates, then the hold on the mode
    expected = math.exp(-100.0 / (250.0 * US)) * math.exp(-hold / (30.0 * MS))
    assert abs(dm.rho[1, 1].real - expected) < 1e-12
    # the same hold on a transmon would have cost far more population
    lat = lattice_pc([PhysicalGate("x", (0,))], 1)
    dm_t = simulate(lat, NoiseParams.default(), hold=hold)
    assert dm.rho[1, 1].real > dm_t.rho[1, 1].real


def test_noiseless_simulation_matches_statevector():
    circ = ghz_circuit(3)
    topo = build_cavity(2, 2)
    pc = transpile_raw_cavity(circ, topo)
    psi = statevector(circ)
    dm = simulate(pc)  # no noise given: ideal
    assert dm.fidelity_pure(psi) > 1 - 1e-12
    pure = simulate_pure(pc)
    assert fidelity_states(pure, psi) > 1 - 1e-12


def test_noise_ordering_default_vs_companion():
    pc = transpile_raw_cavity(ghz_circuit(4), build_cavity(2, 2))
    psi = statevector(ghz_circuit(4))
    f_default = simulate(pc, NoiseParams.default()).fidelity_pure(psi)
    f_companion = simulate(pc, NoiseParams.companion()).fidelity_pure(psi)
    assert 0.0 < f_companion < f_default < 1.0
    assert simulate(pc, NoiseParams.default()).trace_error() < 1e-12


def test_initial_state_is_not_mutated():
    pc = lattice_pc([PhysicalGate("x", (0,))], 1)
    psi0 = np.array([1.0, 0.0], dtype=complex)
    keep = psi0.copy()
    simulate(pc, NoiseParams.default(), initial_state=psi0, hold=1000.0)
    assert np.array_equal(psi0, keep)


def test_size_caps():
    big = build_honeycomb(4, 4)
    with pytest.raises(ValueError):
        simulate(lattice_pc([], 13, topo=big))
    with pytest.raises(ValueError):
        statevector(LogicalCircuit(21, []))


# ---------------------------------------------------------------------------
# observables
# ---------------------------------------------------------------------------

def test_expectation_matches_dense_oracle():
    rng = random.Random(8)
    for seed in range(6):
        n = rng.randrange(1, 5)
        terms = []
        for _ in range(rng.randrange(1, 6)):
            p = "".join(rng.choice("IXYZ") for _ in range(n))
            terms.append(PauliTerm(p, rng.uniform(-2, 2)))
        h = Hamiltonian(n, terms, offset=rng.uniform(-1, 1))
        rho = random_density(n, seed)
        ref = float(np.real(np.trace(rho @ h.matrix())))
        assert abs(expectation(rho, h) - ref) < 1e-9


def test_probabilities_ranked_and_normalized():
    pc = transpile_raw_cavity(ghz_circuit(3), build_cavity(2, 2))
    dm = simulate(pc, NoiseParams.companion())
    probs = dm.probabilities()
    assert abs(sum(probs.values()) - 1.0) < 1e-9
    vals = list(probs.values())
    assert vals == sorted(vals, reverse=True)
    top = dm.probabilities(top_k=2)
    assert set(top) == {"000", "111"}


def test_density_matrix_expectation_method():
    dm = DensityMatrix(np.diag([0.25, 0.75]).astype(complex), 1)
    h = Hamiltonian(1, [PauliTerm("Z", 1.0)])
    assert dm.expectation(h) == pytest.approx(0.25 - 0.75)
