# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``gstab._kernels_py``: same four signatures, row loops
in C.  Rows are packed one uint64 word per Pauli component (n <= 64)."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

BACKEND_NAME = "compiled"

cdef extern from *:
    """
    #if defined(_MSC_VER)
    #include <intrin.h>
    static inline int gstab_popcount64(unsigned long long v) {
        return (int)__popcnt64(v);
    }
    #else
    static inline int gstab_popcount64(unsigned long long v) {
        return __builtin_popcountll(v);
    }
    #endif
    """
    int gstab_popcount64(unsigned long long v) nogil


def anticommute_mask(cnp.uint64_t[::1] xs, cnp.uint64_t[::1] zs,
                     qx, qz):
    """Packed bitmask of rows that anticommute with the Pauli (qx, qz)."""
    cdef cnp.uint64_t cqx = qx
    cdef cnp.uint64_t cqz = qz
    cdef Py_ssize_t i, n = xs.shape[0]
    one = 1  # Python int: the mask can exceed 64 bits (2n rows)
    mask = 0
    for i in range(n):
        if (gstab_popcount64(xs[i] & cqz) + gstab_popcount64(zs[i] & cqx)) & 1:
            mask |= one << i
    return mask


def conj_gate_rows(cnp.uint64_t[::1] xs, cnp.uint64_t[::1] zs,
                   cnp.uint8_t[::1] ph, int code, m1, m2):
    """Conjugate every row by the gate ``code`` acting on bit masks m1/m2."""
    cdef cnp.uint64_t c1 = m1
    cdef cnp.uint64_t c2 = m2 if m2 is not None else 0
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef bint x1, z1, x2, z2, flip
    cdef cnp.uint64_t t
    if code == 0:
        return
    for i in range(n):
        x1 = (xs[i] & c1) != 0
        z1 = (zs[i] & c1) != 0
        flip = False
        if code == 1:                                # X
            flip = z1
        elif code == 2:                              # Y
            flip = x1 ^ z1
        elif code == 3:                              # Z
            flip = x1
        elif code == 4:                              # H
            flip = x1 and z1
            t = (xs[i] ^ zs[i]) & c1
            xs[i] ^= t
            zs[i] ^= t
        elif code == 5:                              # S
            flip = x1 and z1
            zs[i] ^= xs[i] & c1
        elif code == 6:                              # S_DAG
            flip = x1 and not z1
            zs[i] ^= xs[i] & c1
        elif code == 7:                              # H_XY
            flip = z1 and not x1
            zs[i] ^= xs[i] & c1
        elif code == 8:                              # H_NXY
            flip = x1 or z1
            zs[i] ^= xs[i] & c1
        elif code == 9:                              # CX
            x2 = (xs[i] & c2) != 0
            z2 = (zs[i] & c2) != 0
            flip = x1 and z2 and not (x2 ^ z1)
            if x1:
                xs[i] ^= c2
            if z2:
                zs[i] ^= c1
        elif code == 10:                             # CZ
            x2 = (xs[i] & c2) != 0
            z2 = (zs[i] & c2) != 0
            flip = x1 and x2 and (z1 ^ z2)
            if x1:
                zs[i] ^= c2
            if x2:
                zs[i] ^= c1
        elif code == 11:                             # SWAP
            x2 = (xs[i] & c2) != 0
            z2 = (zs[i] & c2) != 0
            if x1 ^ x2:
                xs[i] ^= c1 | c2
            if z1 ^ z2:
                zs[i] ^= c1 | c2
        else:
            raise ValueError(f"unknown gate code {code}")
        if flip:
            ph[i] ^= 2


def mul_rows(cnp.uint64_t[::1] xs, cnp.uint64_t[::1] zs,
             cnp.uint8_t[::1] ph, cnp.uint8_t[::1] sel, px, pz, pe):
    """Multiply the selected rows (boolean mask) by the Pauli (px, pz, pe)."""
    cdef cnp.uint64_t cpx = px
    cdef cnp.uint64_t cpz = pz
    cdef int base = pe + gstab_popcount64(cpx & cpz)
    cdef Py_ssize_t i, n = xs.shape[0]
    cdef cnp.uint64_t x3, z3
    cdef int e
    for i in range(n):
        if not sel[i]:
            continue
        x3 = xs[i] ^ cpx
        z3 = zs[i] ^ cpz
        e = (ph[i] + base
             + 2 * gstab_popcount64(zs[i] & cpx)
             + gstab_popcount64(xs[i] & zs[i])
             - gstab_popcount64(x3 & z3))
        xs[i] = x3
        zs[i] = z3
        ph[i] = <cnp.uint8_t>(e & 3)


def parity_pm(cnp.uint64_t[::1] idx, mask):
    """(-1)**popcount(idx & mask) as a float array."""
    cdef cnp.uint64_t cmask = mask
    cdef Py_ssize_t i, n = idx.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef cnp.float64_t[::1] ov = out
    for i in range(n):
        ov[i] = 1.0 - 2.0 * (gstab_popcount64(idx[i] & cmask) & 1)
    return out
