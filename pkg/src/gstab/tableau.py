"""Stabilizer-destabilizer tableau with exact sign tracking.

Rows 0..n-1 hold the destabilizers d_1..d_n, rows n..2n-1 the stabilizers
s_1..s_n.  Each row is one packed word per component (n <= 64) plus a phase
exponent restricted to {0, 2} (signs only; i-valued rows indicate a bug).

The symplectic relations maintained at all times:
  * stabilizers mutually commute, destabilizers mutually commute,
  * d_i anticommutes with s_i and commutes with s_j for j != i,
  * the 2n rows are independent over GF(2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import backend
from .pauli import PauliString, commutes_packed, mul_packed

MAX_QUBITS = 64

GATE_CODES = {
    "I": 0, "X": 1, "Y": 2, "Z": 3, "H": 4, "S": 5, "S_DAG": 6,
    "H_XY": 7, "H_NXY": 8, "CX": 9, "CZ": 10, "SWAP": 11,
}
TWO_QUBIT_GATES = frozenset({"CX", "CZ", "SWAP"})
CLIFFORD_GATES = frozenset(GATE_CODES)


class TableauError(ValueError):
    """Contract violation in a tableau operation."""


@dataclass(frozen=True)
class IndexShift:
    """The basis-permutation mask of a Pauli: bit i set iff it anticommutes
    with stabilizer s_i.  ``xi_is_needed`` tells callers a nontrivial index
    permutation (and hence per-entry phases) is involved."""
    beta: int
    xi_is_needed: bool


class Tableau:
    def __init__(self, num_qubits: int):
        if not 1 <= num_qubits <= MAX_QUBITS:
            raise TableauError(f"num_qubits must be in 1..{MAX_QUBITS}")
        n = num_qubits
        self.n = n
        self.xs = np.zeros(2 * n, dtype=np.uint64)
        self.zs = np.zeros(2 * n, dtype=np.uint64)
        self.ph = np.zeros(2 * n, dtype=np.uint8)
        for q in range(n):
            self.xs[q] = np.uint64(1 << q)        # d_i = X_i
            self.zs[n + q] = np.uint64(1 << q)    # s_i = Z_i

    def copy(self) -> "Tableau":
        t = Tableau.__new__(Tableau)
        t.n = self.n
        t.xs = self.xs.copy()
        t.zs = self.zs.copy()
        t.ph = self.ph.copy()
        return t

    # -- row access ---------------------------------------------------

    def destab_row(self, i: int) -> tuple[int, int, int]:
        return int(self.xs[i]), int(self.zs[i]), int(self.ph[i])

    def stab_row(self, i: int) -> tuple[int, int, int]:
        j = self.n + i
        return int(self.xs[j]), int(self.zs[j]), int(self.ph[j])

    def destab(self, i: int) -> PauliString:
        return PauliString(self.n, *self.destab_row(i))

    def stab(self, i: int) -> PauliString:
        return PauliString(self.n, *self.stab_row(i))

    # -- Clifford conjugation -----------------------------------------

    def conjugate_gate(self, gate: str, targets: tuple[int, ...]) -> None:
        code = GATE_CODES.get(gate)
        if code is None:
            raise TableauError(f"unknown Clifford gate {gate!r}")
        if gate in TWO_QUBIT_GATES:
            if len(targets) != 2:
                raise TableauError(f"{gate} needs exactly 2 targets")
        elif len(targets) != 1:
            raise TableauError(f"{gate} needs exactly 1 target")
        if len(set(targets)) != len(targets):
            raise TableauError(f"duplicate targets {targets}")
        for q in targets:
            if not 0 <= q < self.n:
                raise TableauError(f"target {q} out of range")
        m1 = 1 << targets[0]
        m2 = (1 << targets[1]) if len(targets) == 2 else 0
        backend.get().conj_gate_rows(self.xs, self.zs, self.ph, code, m1, m2)

    # -- Pauli bookkeeping --------------------------------------------

    def stab_anticommute_mask(self, qx: int, qz: int) -> int:
        n = self.n
        return backend.get().anticommute_mask(self.xs[n:], self.zs[n:], qx, qz)

    def destab_anticommute_mask(self, qx: int, qz: int) -> int:
        n = self.n
        return backend.get().anticommute_mask(self.xs[:n], self.zs[:n], qx, qz)

    def index_shift(self, q: PauliString) -> IndexShift:
        if q.num_qubits != self.n:
            raise TableauError("Pauli size does not match tableau")
        beta = self.stab_anticommute_mask(q.x_bits, q.z_bits)
        return IndexShift(beta=beta, xi_is_needed=beta != 0)

    def pauli_action(self, qx: int, qz: int, qe: int) -> tuple[int, int, int]:
        """Decompose how the Pauli acts on the tableau-induced basis.

        Returns (beta, delta, xi0_exp): the stabilizer anticommutation mask
        beta (index shift), the destabilizer anticommutation mask delta (which
        drives the per-index sign (-1)^<delta, alpha>), and the i-power of the
        base phase xi_0 on |b_0> = |psi_S>.
        """
        beta = self.stab_anticommute_mask(qx, qz)
        delta = self.destab_anticommute_mask(qx, qz)
        # R = d_beta^dagger * Q must lie in +/- i^k S; its eigenvalue on
        # |psi_S> is xi_0.
        dx, dz, de = 0, 0, 0
        b = beta
        while b:
            k = (b & -b).bit_length() - 1
            dx, dz, de = mul_packed(dx, dz, de, *self.destab_row(k))
            b &= b - 1
        rx, rz, re = mul_packed(dx, dz, (-de) & 3, qx, qz, qe)
        gamma = self.destab_anticommute_mask(rx, rz)
        mx, mz, me = 0, 0, 0
        g = gamma
        while g:
            k = (g & -g).bit_length() - 1
            mx, mz, me = mul_packed(mx, mz, me, *self.stab_row(k))
            g &= g - 1
        if mx != rx or mz != rz:
            raise TableauError("stabilizer decomposition failed; tableau corrupt")
        xi0_exp = (re - me) & 3
        return beta, delta, xi0_exp

    def diagonal_eigenvalue(self, p: PauliString, alpha: int) -> int:
        """Eigenvalue of p (in +/- the stabilizer group) on basis vector
        |b_alpha>."""
        if p.num_qubits != self.n:
            raise TableauError("Pauli size does not match tableau")
        beta, delta, xi0_exp = self.pauli_action(p.x_bits, p.z_bits, p.phase_exp)
        if beta != 0:
            raise TableauError("Pauli is not in +/- the stabilizer group")
        if xi0_exp % 2 != 0:
            raise TableauError("imaginary eigenvalue; non-Hermitian input")
        sign = 1 if xi0_exp == 0 else -1
        if (delta & alpha).bit_count() % 2:
            sign = -sign
        return sign

    # -- measurement pivot --------------------------------------------

    def pivot_measure(self, p: PauliString, outcome_sign: int) -> int:
        """Tableau update for a non-deterministic measurement of p.

        The caller must have established beta(p) != 0.  Returns the pivot
        index.
        """
        if p.num_qubits != self.n:
            raise TableauError("Pauli size does not match tableau")
        if outcome_sign not in (1, -1):
            raise TableauError("outcome_sign must be +1 or -1")
        n = self.n
        amask = backend.get().anticommute_mask(self.xs, self.zs,
                                               p.x_bits, p.z_bits)
        beta = amask >> n
        if beta == 0:
            raise TableauError("pivot_measure called on a deterministic Pauli")
        t = (beta & -beta).bit_length() - 1
        px, pz, pe = self.stab_row(t)
        # Multiply every other anticommuting row by the old pivot stabilizer.
        # The pivot's destabilizer is overwritten below, so it is excluded.
        amask &= ~(1 << (n + t))
        amask &= ~(1 << t)
        sel = np.zeros(2 * n, dtype=bool)
        m = amask
        while m:
            sel[(m & -m).bit_length() - 1] = True
            m &= m - 1
        if sel.any():
            backend.get().mul_rows(self.xs, self.zs, self.ph, sel, px, pz, pe)
        self.xs[t] = np.uint64(px)
        self.zs[t] = np.uint64(pz)
        self.ph[t] = np.uint8(pe)
        self.xs[n + t] = np.uint64(p.x_bits)
        self.zs[n + t] = np.uint64(p.z_bits)
        self.ph[n + t] = np.uint8((p.phase_exp + (0 if outcome_sign == 1 else 2)) & 3)
        return t

    # -- validation and diagnostics -----------------------------------

    def check_invariants(self) -> None:
        n = self.n
        for j in range(2 * n):
            if int(self.ph[j]) not in (0, 2):
                raise TableauError(f"row {j} carries an i-valued phase")
        rows = [(int(self.xs[j]), int(self.zs[j])) for j in range(2 * n)]
        for i in range(n):
            for j in range(n):
                if not commutes_packed(*rows[n + i], *rows[n + j]):
                    raise TableauError(f"s_{i} and s_{j} anticommute")
                if not commutes_packed(*rows[i], *rows[j]):
                    raise TableauError(f"d_{i} and d_{j} anticommute")
                if commutes_packed(*rows[i], *rows[n + j]) != (i != j):
                    raise TableauError(f"d_{i}/s_{j} commutation pattern broken")
        if self._gf2_rank() != 2 * n:
            raise TableauError("rows are not independent over GF(2)")

    def _gf2_rank(self) -> int:
        vecs = [(int(self.xs[j]) << self.n) | int(self.zs[j])
                for j in range(2 * self.n)]
        rank = 0
        pivots: list[int] = []
        for v in vecs:
            for p in pivots:
                v = min(v, v ^ p)
            if v:
                pivots.append(v)
                rank += 1
        return rank

    def dump(self) -> str:
        lines = [f"# destabilizers (n={self.n})"]
        lines += [str(self.destab(i)) for i in range(self.n)]
        lines.append("# stabilizers")
        lines += [str(self.stab(i)) for i in range(self.n)]
        return "\n".join(lines)
