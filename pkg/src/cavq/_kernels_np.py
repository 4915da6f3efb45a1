"""NumPy reference kernels for density-matrix and statevector updates.

These are the pure-Python fallback for the compiled extension in
``_kernels.pyx``. Both expose the same API; every function takes and returns
the state array (the returned array may or may not alias the input, so
callers must use the return value).

Qubit indexing matches the package convention: qubit 0 is the most
significant bit of a basis index, so qubit k has row-block size
``2**(n-k-1)``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

_perm_cache: dict[tuple[int, int, int], np.ndarray] = {}


def _cx_perm(n: int, control: int, target: int) -> np.ndarray:
    key = (n, control, target)
    perm = _perm_cache.get(key)
    if perm is None:
        dim = 1 << n
        idx = np.arange(dim)
        cmask = 1 << (n - control - 1)
        tmask = 1 << (n - target - 1)
        perm = np.where(idx & cmask, idx ^ tmask, idx)
        _perm_cache[key] = perm
    return perm


def _split(n: int, k: int) -> tuple[int, int]:
    return 1 << k, 1 << (n - k - 1)


# ---------------------------------------------------------------------------
# density matrix (2^n x 2^n complex128)
# ---------------------------------------------------------------------------

def rho_apply_1q(rho: np.ndarray, u: np.ndarray, n: int, k: int) -> np.ndarray:
    dim = 1 << n
    left, right = _split(n, k)
    r = rho.reshape(left, 2, right * dim)
    r = np.einsum("ab,lbx->lax", u, r)
    r = r.reshape(dim, left, 2, right)
    r = np.einsum("ab,xlbr->xlar", u.conj(), r)
    return np.ascontiguousarray(r.reshape(dim, dim))


def rho_apply_2q(rho: np.ndarray, u4: np.ndarray, n: int, j: int,
                 k: int) -> np.ndarray:
    if j > k:
        # reorder the 4x4 so the lower qubit index comes first
        swap = [0, 2, 1, 3]
        u4 = u4[np.ix_(swap, swap)]
        j, k = k, j
    dim = 1 << n
    lj = 1 << j
    mid = 1 << (k - j - 1)
    rk = 1 << (n - k - 1)
    ur = u4.reshape(2, 2, 2, 2)  # [a, b, c, d]: out bits (a,b), in bits (c,d)
    r = rho.reshape(lj, 2, mid, 2, rk * dim)
    r = np.einsum("abcd,lcmdx->lambx", ur, r)
    r = r.reshape(dim, lj, 2, mid, 2, rk)
    r = np.einsum("abcd,xlcmdr->xlambr", ur.conj(), r)
    return np.ascontiguousarray(r.reshape(dim, dim))


def rho_apply_cx(rho: np.ndarray, n: int, control: int,
                 target: int) -> np.ndarray:
    perm = _cx_perm(n, control, target)
    return np.ascontiguousarray(rho[np.ix_(perm, perm)])


def rho_apply_rz(rho: np.ndarray, angle: float, n: int, k: int) -> np.ndarray:
    """RZ is diagonal: only the cross blocks of qubit k pick up e^{-+ia}."""
    left, right = _split(n, k)
    phase = np.exp(-1j * angle)
    r6 = rho.reshape(left, 2, right, left, 2, right)
    r6[:, 0, :, :, 1, :] *= phase
    r6[:, 1, :, :, 0, :] *= phase.conjugate()
    return rho


def rho_decay(rho: np.ndarray, gamma: float, eta: float, n: int,
              k: int) -> np.ndarray:
    """Combined amplitude-damping + dephasing channel on qubit k, in place.

    gamma = 1 - exp(-t/T1); eta = exp(-t/T2) is the off-diagonal survival.
    """
    left, right = _split(n, k)
    r6 = rho.reshape(left, 2, right, left, 2, right)
    r6[:, 0, :, :, 0, :] += gamma * r6[:, 1, :, :, 1, :]
    r6[:, 0, :, :, 1, :] *= eta
    r6[:, 1, :, :, 0, :] *= eta
    r6[:, 1, :, :, 1, :] *= 1.0 - gamma
    return rho


# ---------------------------------------------------------------------------
# statevector (2^n complex128)
# ---------------------------------------------------------------------------

def psi_apply_1q(psi: np.ndarray, u: np.ndarray, n: int, k: int) -> np.ndarray:
    left, right = _split(n, k)
    r = psi.reshape(left, 2, right)
    r = np.einsum("ab,lbr->lar", u, r)
    return np.ascontiguousarray(r.reshape(-1))


def psi_apply_2q(psi: np.ndarray, u4: np.ndarray, n: int, j: int,
                 k: int) -> np.ndarray:
    if j > k:
        swap = [0, 2, 1, 3]
        u4 = u4[np.ix_(swap, swap)]
        j, k = k, j
    lj = 1 << j
    mid = 1 << (k - j - 1)
    rk = 1 << (n - k - 1)
    ur = u4.reshape(2, 2, 2, 2)
    r = psi.reshape(lj, 2, mid, 2, rk)
    r = np.einsum("abcd,lcmdr->lambr", ur, r)
    return np.ascontiguousarray(r.reshape(-1))


def psi_apply_cx(psi: np.ndarray, n: int, control: int,
                 target: int) -> np.ndarray:
    return np.ascontiguousarray(psi[_cx_perm(n, control, target)])


def psi_apply_rz(psi: np.ndarray, angle: float, n: int, k: int) -> np.ndarray:
    left, right = _split(n, k)
    r = psi.reshape(left, 2, right).copy()
    r[:, 0, :] *= np.exp(-0.5j * angle)
    r[:, 1, :] *= np.exp(0.5j * angle)
    return r.reshape(-1)
