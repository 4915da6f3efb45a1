"""Compiled kernels against the NumPy reference implementation."""
import numpy as np
import pytest

from cavq.kernels import backend_name, compiled_backend, numpy_backend

REF = numpy_backend()
FAST = compiled_backend()

needs_ext = pytest.mark.skipif(FAST is None,
                               reason="compiled extension not built")


def random_rho(n, seed):
    rng = np.random.default_rng(seed)
    dim = 1 << n
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return np.ascontiguousarray(rho / np.trace(rho))


def random_psi(n, seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return np.ascontiguousarray(psi / np.linalg.norm(psi))


def random_u(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(a)
    return q


def test_backend_identity():
    assert REF.BACKEND == "numpy"
    assert backend_name() in ("numpy", "cython")
    if FAST is not None:
        assert FAST.BACKEND == "cython"


@needs_ext
@pytest.mark.parametrize("n", [1, 2, 4])
def test_rho_1q_parity(n):
    for k in range(n):
        rho = random_rho(n, seed=10 * n + k)
        u = random_u(2, seed=k)
        a = REF.rho_apply_1q(rho.copy(), u, n, k)
        b = FAST.rho_apply_1q(rho.copy(), u, n, k)
        assert np.abs(a - b).max() < 1e-12


@needs_ext
@pytest.mark.parametrize("n", [2, 3, 4])
def test_rho_2q_parity(n):
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            rho = random_rho(n, seed=97 * n + 7 * j + k)
            u = random_u(4, seed=j * 31 + k)
            a = REF.rho_apply_2q(rho.copy(), u, n, j, k)
            b = FAST.rho_apply_2q(rho.copy(), u, n, j, k)
            assert np.abs(a - b).max() < 1e-12


@needs_ext
@pytest.mark.parametrize("n", [2, 4])
def test_rho_cx_rz_decay_parity(n):
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            rho = random_rho(n, seed=3 * j + k)
            a = REF.rho_apply_cx(rho.copy(), n, j, k)
            b = FAST.rho_apply_cx(rho.copy(), n, j, k)
            assert np.abs(a - b).max() < 1e-12
    for k in range(n):
        rho = random_rho(n, seed=50 + k)
        a = REF.rho_apply_rz(rho.copy(), 0.7, n, k)
        b = FAST.rho_apply_rz(rho.copy(), 0.7, n, k)
        assert np.abs(a - b).max() < 1e-12
        rho = random_rho(n, seed=60 + k)
        a = REF.rho_decay(rho.copy(), 0.2, 0.9, n, k)
        b = FAST.rho_decay(rho.copy(), 0.2, 0.9, n, k)
        assert np.abs(a - b).max() < 1e-12


@needs_ext
@pytest.mark.parametrize("n", [1, 3, 5])
def test_psi_parity(n):
    for k in range(n):
        psi = random_psi(n, seed=5 * n + k)
        u = random_u(2, seed=k + 1)
        a = REF.psi_apply_1q(psi.copy(), u, n, k)
        b = FAST.psi_apply_1q(psi.copy(), u, n, k)
        assert np.abs(a - b).max() < 1e-12
        a = REF.psi_apply_rz(psi.copy(), -1.3, n, k)
        b = FAST.psi_apply_rz(psi.copy(), -1.3, n, k)
        assert np.abs(a - b).max() < 1e-12
    for j in range(n):
        for k in range(n):
            if j == k:
                continue
            psi = random_psi(n, seed=j * 17 + k)
            u = random_u(4, seed=j + 2 * k)
            a = REF.psi_apply_2q(psi.copy(), u, n, j, k)
            b = FAST.psi_apply_2q(psi.copy(), u, n, j, k)
            assert np.abs(a - b).max() < 1e-12
            a = REF.psi_apply_cx(psi.copy(), n, j, k)
            b = FAST.psi_apply_cx(psi.copy(), n, j, k)
            assert np.abs(a - b).max() < 1e-12


def test_msb_convention():
    # qubit 0 is the most significant bit of the basis index
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    psi = np.zeros(4, dtype=complex)
    psi[0b00] = 1.0
    out = REF.psi_apply_1q(psi.copy(), x, 2, 0)
    assert abs(out[0b10] - 1.0) < 1e-12
    out = REF.psi_apply_1q(psi.copy(), x, 2, 1)
    assert abs(out[0b01] - 1.0) < 1e-12


def test_cx_truth_table():
    for n, c, t in [(2, 0, 1), (2, 1, 0), (3, 0, 2)]:
        for basis in range(1 << n):
            psi = np.zeros(1 << n, dtype=complex)
            psi[basis] = 1.0
            out = REF.psi_apply_cx(psi, n, c, t)
            cbit = (basis >> (n - 1 - c)) & 1
            want = basis ^ ((cbit) << (n - 1 - t))
            assert abs(out[want] - 1.0) < 1e-12


@needs_ext
def test_full_simulation_parity():
    # end-to-end: same circuit through both backends, identical output
    import json
    import os
    import subprocess
    import sys
    code = (
        "import json\n"
        "from cavq.topology import build_cavity\n"
        "from cavq.transpile import transpile_raw_cavity\n"
        "from cavq.circuits import ghz_circuit\n"
        "from cavq.densim import simulate, NoiseParams\n"
        "import cavq.kernels as k\n"
        "pc = transpile_raw_cavity(ghz_circuit(4), build_cavity(2, 2))\n"
        "dm = simulate(pc, NoiseParams.default())\n"
        "print(json.dumps({'backend': k.BACKEND,\n"
        "                  'rho': [[v.real, v.imag] for v in dm.rho.ravel()]}))\n"
    )
    outs = {}
    for env_val in ("0", "1"):
        env = dict(os.environ, CAVQ_PURE_PYTHON=env_val)
        proc = subprocess.run([sys.executable, "-c", code],
                              capture_output=True, text=True, env=env,
                              check=True)
        payload = json.loads(proc.stdout)
        outs[payload["backend"]] = np.array(payload["rho"])
    assert set(outs) == {"cython", "numpy"}
    assert np.abs(outs["cython"] - outs["numpy"]).max() < 1e-12
