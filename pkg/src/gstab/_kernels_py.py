"""Pure-numpy implementations of the hot per-shot kernels.

Rows are packed one machine word per Pauli component (n <= 64), so every
kernel is a handful of bitwise ops and popcounts over small arrays.  The
compiled extension ``gstab._kernels`` implements the same signatures; the
active module is chosen in :mod:`gstab.backend`.

Gate codes must match ``gstab.tableau.GATE_CODES``.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "python"

_U64 = np.uint64


def anticommute_mask(xs: np.ndarray, zs: np.ndarray, qx: int, qz: int) -> int:
    """Packed bitmask of rows that anticommute with the Pauli (qx, qz)."""
    par = (np.bitwise_count(xs & _U64(qz)) + np.bitwise_count(zs & _U64(qx))) & 1
    bits = np.nonzero(par)[0]
    mask = 0
    for j in bits:
        mask |= 1 << int(j)
    return mask


def conj_gate_rows(xs: np.ndarray, zs: np.ndarray, ph: np.ndarray,
                   code: int, m1: int, m2: int) -> None:
    """Conjugate every row by the gate ``code`` acting on bit masks m1/m2."""
    m1 = _U64(m1)
    x1 = (xs & m1) != 0
    z1 = (zs & m1) != 0
    if code == 0:                                    # I
        return
    if code == 1:                                    # X
        flip = z1
    elif code == 2:                                  # Y
        flip = x1 ^ z1
    elif code == 3:                                  # Z
        flip = x1
    elif code == 4:                                  # H
        flip = x1 & z1
        t = (xs ^ zs) & m1
        xs ^= t
        zs ^= t
    elif code == 5:                                  # S
        flip = x1 & z1
        zs ^= xs & m1
    elif code == 6:                                  # S_DAG
        flip = x1 & ~z1
        zs ^= xs & m1
    elif code == 7:                                  # H_XY
        flip = z1 & ~x1
        zs ^= xs & m1
    elif code == 8:                                  # H_NXY
        flip = x1 | z1
        zs ^= xs & m1
    elif code == 9:                                  # CX
        m2 = _U64(m2)
        x2 = (xs & m2) != 0
        z2 = (zs & m2) != 0
        flip = x1 & z2 & ~(x2 ^ z1)
        xs[x1] ^= m2
        zs[z2] ^= m1
    elif code == 10:                                 # CZ
        m2 = _U64(m2)
        x2 = (xs & m2) != 0
        z2 = (zs & m2) != 0
        flip = x1 & x2 & (z1 ^ z2)
        zs[x1] ^= m2
        zs[x2] ^= m1
    elif code == 11:                                 # SWAP
        m2 = _U64(m2)
        both = m1 | m2
        for arr in (xs, zs):
            a1 = (arr & m1) != 0
            a2 = (arr & m2) != 0
            swap = a1 ^ a2
            arr[swap] ^= both
        return
    else:
        raise ValueError(f"unknown gate code {code}")
    ph[flip] ^= 2


def mul_rows(xs: np.ndarray, zs: np.ndarray, ph: np.ndarray,
             sel: np.ndarray, px: int, pz: int, pe: int) -> None:
    """Multiply the selected rows (boolean mask) by the Pauli (px, pz, pe)."""
    p_y_count = (px & pz).bit_count()
    px = _U64(px)
    pz = _U64(pz)
    xj = xs[sel]
    zj = zs[sel]
    x3 = xj ^ px
    z3 = zj ^ pz
    e = (ph[sel].astype(np.int64) + pe + p_y_count
         + 2 * np.bitwise_count(zj & px).astype(np.int64)
         + np.bitwise_count(xj & zj).astype(np.int64)
         - np.bitwise_count(x3 & z3).astype(np.int64))
    xs[sel] = x3
    zs[sel] = z3
    ph[sel] = (e & 3).astype(np.uint8)


def parity_pm(idx: np.ndarray, mask: int) -> np.ndarray:
    """(-1)**popcount(idx & mask) as a float array."""
    return 1.0 - 2.0 * (np.bitwise_count(idx & _U64(mask)) & _U64(1)).astype(np.float64)
