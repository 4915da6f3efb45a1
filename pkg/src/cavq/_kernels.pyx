# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for density-matrix and statevector updates.

Same API and index convention as ``_kernels_np`` (qubit 0 is the most
significant basis-index bit). Unitary conjugation is done blockwise: a
one-qubit gate touches 2x2 sub-blocks of the density matrix, a two-qubit
gate 4x4, so each update is a single pass over the matrix with no
temporaries beyond a stack block.
"""

import numpy as np

BACKEND = "cython"

ctypedef double complex cplx


cdef inline Py_ssize_t _ins(Py_ssize_t base, int pos) nogil:
    # insert a zero bit at position `pos` (counted from the LSB)
    return ((base >> pos) << (pos + 1)) | (base & ((<Py_ssize_t>1 << pos) - 1))


def _prep(object a):
    return np.ascontiguousarray(a, dtype=np.complex128)


# ---------------------------------------------------------------------------
# density matrix
# ---------------------------------------------------------------------------

def rho_apply_1q(rho, u, int n, int k):
    rho = _prep(rho)
    u = _prep(u)
    cdef cplx[:, ::1] r = rho
    cdef cplx[:, ::1] um = u
    cdef int pos = n - k - 1
    cdef Py_ssize_t mask = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = <Py_ssize_t>1 << (n - 1)
    cdef Py_ssize_t bi, bj, i0, i1, j0, j1
    cdef cplx u00 = um[0, 0], u01 = um[0, 1], u10 = um[1, 0], u11 = um[1, 1]
    cdef cplx c00 = u00.conjugate(), c01 = u01.conjugate()
    cdef cplx c10 = u10.conjugate(), c11 = u11.conjugate()
    cdef cplx a, b, c, d, ra, rb, rc, rd
    with nogil:
        for bi in range(half):
            i0 = _ins(bi, pos)
            i1 = i0 | mask
            for bj in range(half):
                j0 = _ins(bj, pos)
                j1 = j0 | mask
                a = r[i0, j0]; b = r[i0, j1]
                c = r[i1, j0]; d = r[i1, j1]
                # U . block
                ra = u00 * a + u01 * c
                rb = u00 * b + u01 * d
                rc = u10 * a + u11 * c
                rd = u10 * b + u11 * d
                # . U^dagger
                r[i0, j0] = ra * c00 + rb * c01
                r[i0, j1] = ra * c10 + rb * c11
                r[i1, j0] = rc * c00 + rd * c01
                r[i1, j1] = rc * c10 + rd * c11
    return rho


def rho_apply_2q(rho, u4, int n, int j, int k):
    cdef int t
    if j > k:
        u4 = np.asarray(u4)[np.ix_([0, 2, 1, 3], [0, 2, 1, 3])]
        t = j; j = k; k = t
    rho = _prep(rho)
    u4 = _prep(u4)
    cdef cplx[:, ::1] r = rho
    cdef cplx[:, ::1] um = u4
    cdef int pj = n - j - 1, pk = n - k - 1
    cdef Py_ssize_t mj = <Py_ssize_t>1 << pj, mk = <Py_ssize_t>1 << pk
    cdef Py_ssize_t quarter = <Py_ssize_t>1 << (n - 2)
    cdef Py_ssize_t bi, bj, base
    cdef Py_ssize_t ri[4]
    cdef Py_ssize_t ci[4]
    cdef cplx blk[4][4]
    cdef cplx tmp[4][4]
    cdef cplx acc
    cdef int a, b, c
    with nogil:
        for bi in range(quarter):
            base = _ins(_ins(bi, pk), pj)
            ri[0] = base; ri[1] = base | mk
            ri[2] = base | mj; ri[3] = base | mj | mk
            for bj in range(quarter):
                base = _ins(_ins(bj, pk), pj)
                ci[0] = base; ci[1] = base | mk
                ci[2] = base | mj; ci[3] = base | mj | mk
                for a in range(4):
                    for b in range(4):
                        blk[a][b] = r[ri[a], ci[b]]
                for a in range(4):
                    for b in range(4):
                        acc = 0
                        for c in range(4):
                            acc = acc + um[a, c] * blk[c][b]
                        tmp[a][b] = acc
                for a in range(4):
                    for b in range(4):
                        acc = 0
                        for c in range(4):
                            acc = acc + tmp[a][c] * um[b, c].conjugate()
                        r[ri[a], ci[b]] = acc
    return rho


def rho_apply_cx(rho, int n, int control, int target):
    rho = _prep(rho)
    cdef cplx[:, ::1] r = rho
    cdef Py_ssize_t cmask = <Py_ssize_t>1 << (n - control - 1)
    cdef Py_ssize_t tmask = <Py_ssize_t>1 << (n - target - 1)
    cdef Py_ssize_t dim = <Py_ssize_t>1 << n
    cdef Py_ssize_t i, jj, p
    cdef cplx tv
    with nogil:
        # swap row pairs (control bit set, target bit 0 <-> 1)
        for i in range(dim):
            if (i & cmask) and not (i & tmask):
                p = i | tmask
                for jj in range(dim):
                    tv = r[i, jj]; r[i, jj] = r[p, jj]; r[p, jj] = tv
        # swap column pairs
        for i in range(dim):
            for jj in range(dim):
                if (jj & cmask) and not (jj & tmask):
                    p = jj | tmask
                    tv = r[i, jj]; r[i, jj] = r[i, p]; r[i, p] = tv
    return rho


def rho_apply_rz(rho, double angle, int n, int k):
    rho = _prep(rho)
    cdef cplx[:, ::1] r = rho
    cdef int pos = n - k - 1
    cdef Py_ssize_t mask = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = <Py_ssize_t>1 << (n - 1)
    cdef cplx ph = np.exp(-1j * angle)
    cdef cplx phc = ph.conjugate()
    cdef Py_ssize_t bi, bj, i0, i1, j0, j1
    with nogil:
        for bi in range(half):
            i0 = _ins(bi, pos)
            i1 = i0 | mask
            for bj in range(half):
                j0 = _ins(bj, pos)
                j1 = j0 | mask
                r[i0, j1] = r[i0, j1] * ph
                r[i1, j0] = r[i1, j0] * phc
    return rho


def rho_decay(rho, double gamma, double eta, int n, int k):
    rho = _prep(rho)
    cdef cplx[:, ::1] r = rho
    cdef int pos = n - k - 1
    cdef Py_ssize_t mask = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = <Py_ssize_t>1 << (n - 1)
    cdef double keep = 1.0 - gamma
    cdef Py_ssize_t bi, bj, i0, i1, j0, j1
    with nogil:
        for bi in range(half):
            i0 = _ins(bi, pos)
            i1 = i0 | mask
            for bj in range(half):
                j0 = _ins(bj, pos)
                j1 = j0 | mask
                r[i0, j0] = r[i0, j0] + gamma * r[i1, j1]
                r[i0, j1] = r[i0, j1] * eta
                r[i1, j0] = r[i1, j0] * eta
                r[i1, j1] = r[i1, j1] * keep
    return rho


# ---------------------------------------------------------------------------
# statevector
# ---------------------------------------------------------------------------

def psi_apply_1q(psi, u, int n, int k):
    psi = _prep(psi)
    u = _prep(u)
    cdef cplx[::1] p = psi
    cdef cplx[:, ::1] um = u
    cdef int pos = n - k - 1
    cdef Py_ssize_t mask = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = <Py_ssize_t>1 << (n - 1)
    cdef cplx u00 = um[0, 0], u01 = um[0, 1], u10 = um[1, 0], u11 = um[1, 1]
    cdef Py_ssize_t bi, i0, i1
    cdef cplx a, b
    with nogil:
        for bi in range(half):
            i0 = _ins(bi, pos)
            i1 = i0 | mask
            a = p[i0]; b = p[i1]
            p[i0] = u00 * a + u01 * b
            p[i1] = u10 * a + u11 * b
    return psi


def psi_apply_2q(psi, u4, int n, int j, int k):
    cdef int t
    if j > k:
        u4 = np.asarray(u4)[np.ix_([0, 2, 1, 3], [0, 2, 1, 3])]
        t = j; j = k; k = t
    psi = _prep(psi)
    u4 = _prep(u4)
    cdef cplx[::1] p = psi
    cdef cplx[:, ::1] um = u4
    cdef int pj = n - j - 1, pk = n - k - 1
    cdef Py_ssize_t mj = <Py_ssize_t>1 << pj, mk = <Py_ssize_t>1 << pk
    cdef Py_ssize_t quarter = <Py_ssize_t>1 << (n - 2)
    cdef Py_ssize_t bi, base
    cdef Py_ssize_t idx[4]
    cdef cplx v[4]
    cdef cplx acc
    cdef int a, c
    with nogil:
        for bi in range(quarter):
            base = _ins(_ins(bi, pk), pj)
            idx[0] = base; idx[1] = base | mk
            idx[2] = base | mj; idx[3] = base | mj | mk
            for a in range(4):
                v[a] = p[idx[a]]
            for a in range(4):
                acc = 0
                for c in range(4):
                    acc = acc + um[a, c] * v[c]
                p[idx[a]] = acc
    return psi


def psi_apply_cx(psi, int n, int control, int target):
    psi = _prep(psi)
    cdef cplx[::1] p = psi
    cdef Py_ssize_t cmask = <Py_ssize_t>1 << (n - control - 1)
    cdef Py_ssize_t tmask = <Py_ssize_t>1 << (n - target - 1)
    cdef Py_ssize_t dim = <Py_ssize_t>1 << n
    cdef Py_ssize_t i, q
    cdef cplx tv
    with nogil:
        for i in range(dim):
            if (i & cmask) and not (i & tmask):
                q = i | tmask
                tv = p[i]; p[i] = p[q]; p[q] = tv
    return psi


def psi_apply_rz(psi, double angle, int n, int k):
    psi = _prep(psi)
    cdef cplx[::1] p = psi
    cdef int pos = n - k - 1
    cdef Py_ssize_t mask = <Py_ssize_t>1 << pos
    cdef Py_ssize_t half = <Py_ssize_t>1 << (n - 1)
    cdef cplx lo = np.exp(-0.5j * angle)
    cdef cplx hi = np.exp(0.5j * angle)
    cdef Py_ssize_t bi, i0
    with nogil:
        for bi in range(half):
            i0 = _ins(bi, pos)
            p[i0] = p[i0] * lo
            p[i0 | mask] = p[i0 | mask] * hi
    return psi
