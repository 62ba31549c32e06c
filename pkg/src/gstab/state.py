"""Sparse-coefficient stabilizer state: tableau plus amplitude map.

A state is ``sum_alpha v_alpha d_alpha |psi_S>`` where the tableau induces the
orthonormal basis and the nonzero ``v_alpha`` are kept as parallel sorted
arrays (packed ``alpha`` index, complex amplitude).  Clifford gates touch only
the tableau; Pauli errors permute indices up to phase; measurements filter or
pair-merge entries; T gates branch each entry into at most two.

Everything is exact up to floating point: index shifts and eigenvalues come
from integer symplectic algebra, amplitude phases from fourth roots of unity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .pauli import PauliString
from .tableau import Tableau, TableauError

PRUNE_THRESHOLD = 1e-12
DEFAULT_CAPACITY = 4096
DENSE_MAX_QUBITS = 14

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class CapacityError(RuntimeError):
    """The sparse amplitude vector outgrew its configured capacity."""

    def __init__(self, needed: int, capacity: int):
        super().__init__(f"need {needed} entries, capacity {capacity}")
        self.needed = needed
        self.capacity = capacity


class CorruptStateError(RuntimeError):
    """Numerical inconsistency: no measurement branch has usable weight."""


@dataclass(frozen=True)
class CosetAnalysis:
    """Sparsity bound for a diagonal T-layer on the given support."""
    support: frozenset[int]
    r_q: int
    bound: int


class GenStabState:
    def __init__(self, num_qubits: int, capacity: int = DEFAULT_CAPACITY):
        self.tableau = Tableau(num_qubits)
        self.n = num_qubits
        self.capacity = capacity
        self.idx = np.zeros(1, dtype=np.uint64)
        self.amp = np.ones(1, dtype=np.complex128)

    # -- inspection ---------------------------------------------------

    @property
    def entry_count(self) -> int:
        return len(self.idx)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amp) ** 2))

    def snapshot(self) -> list[tuple[int, complex]]:
        """Deterministic (sorted-index) view of the nonzero amplitudes."""
        return [(int(i), complex(a)) for i, a in zip(self.idx, self.amp)]

    def copy(self) -> "GenStabState":
        st = GenStabState.__new__(GenStabState)
        st.tableau = self.tableau.copy()
        st.n = self.n
        st.capacity = self.capacity
        st.idx = self.idx.copy()
        st.amp = self.amp.copy()
        return st

    # -- unitaries ----------------------------------------------------

    def apply_clifford(self, gate: str, targets: tuple[int, ...]) -> None:
        """Clifford gates co-rotate the basis; amplitudes never move."""
        self.tableau.conjugate_gate(gate, targets)

    def apply_pauli(self, e: PauliString) -> None:
        if e.num_qubits != self.n:
            raise TableauError("Pauli size does not match state")
        if not e.is_hermitian:
            raise TableauError("Pauli errors must be Hermitian")
        if e.is_identity:
            if e.phase_exp == 2:
                self.amp = -self.amp
            return
        beta, delta, xi0_exp = self.tableau.pauli_action(
            e.x_bits, e.z_bits, e.phase_exp)
        phases = _I_POWERS[xi0_exp] * backend.get().parity_pm(self.idx, delta)
        self.idx = self.idx ^ np.uint64(beta)
        self.amp = self.amp * phases
        self._resort()

    def apply_t(self, q: int, dagger: bool = False) -> None:
        if not 0 <= q < self.n:
            raise TableauError(f"qubit {q} out of range")
        c = math.cos(math.pi / 8)
        s = math.sin(math.pi / 8)
        if dagger:
            phase = complex(math.cos(-math.pi / 8), math.sin(-math.pi / 8))
            a = phase * c
            b = 1j * phase * s
        else:
            phase = complex(math.cos(math.pi / 8), math.sin(math.pi / 8))
            a = phase * c
            b = -1j * phase * s
        zq = 1 << q
        beta, delta, xi0_exp = self.tableau.pauli_action(0, zq, 0)
        xi = _I_POWERS[xi0_exp] * backend.get().parity_pm(self.idx, delta)
        if beta == 0:
            # Z_q is in +/- the stabilizer group: diagonal, pure phase per
            # entry, |v| unchanged.
            if xi0_exp % 2 != 0:
                raise CorruptStateError("imaginary Z eigenvalue in T update")
            self.amp = self.amp * (a + b * xi)
            return
        cat_idx = np.concatenate([self.idx, self.idx ^ np.uint64(beta)])
        cat_amp = np.concatenate([a * self.amp, b * xi * self.amp])
        self._merge(cat_idx, cat_amp)

    # -- measurement --------------------------------------------------

    def measure_pauli(self, p: PauliString, u: float) -> int:
        """Measure the Hermitian Pauli p; u in [0,1) picks the branch.

        Returns +1 or -1.  The post-state is the renormalized projection.
        """
        if p.num_qubits != self.n:
            raise TableauError("Pauli size does not match state")
        if not p.is_hermitian:
            raise TableauError("measured Pauli must be Hermitian")
        beta, delta, xi0_exp = self.tableau.pauli_action(
            p.x_bits, p.z_bits, p.phase_exp)
        if beta == 0:
            return self._measure_deterministic(delta, xi0_exp, u)
        return self._measure_pivot(p, beta, delta, xi0_exp, u)

    def branch_probability_plus(self, p: PauliString) -> float:
        """Probability of the +1 outcome without collapsing the state."""
        if not p.is_hermitian:
            raise TableauError("measured Pauli must be Hermitian")
        beta, delta, xi0_exp = self.tableau.pauli_action(
            p.x_bits, p.z_bits, p.phase_exp)
        if beta == 0:
            if xi0_exp % 2 != 0:
                raise CorruptStateError("imaginary eigenvalue for Hermitian Pauli")
            lam = _I_POWERS[xi0_exp].real * backend.get().parity_pm(self.idx, delta)
            return float(np.sum(np.abs(self.amp[lam > 0]) ** 2))
        _, _, wp, _ = self._pivot_pairs(beta, delta, xi0_exp)
        return float(0.5 * np.sum(np.abs(wp) ** 2))

    def _measure_deterministic(self, delta: int, xi0_exp: int, u: float) -> int:
        if xi0_exp % 2 != 0:
            raise CorruptStateError("imaginary eigenvalue for Hermitian Pauli")
        lam = _I_POWERS[xi0_exp].real * backend.get().parity_pm(self.idx, delta)
        plus = lam > 0
        prob_plus = float(np.sum(np.abs(self.amp[plus]) ** 2))
        outcome = 1 if u < prob_plus else -1
        chosen = prob_plus if outcome == 1 else 1.0 - prob_plus
        if chosen < 1e-12:
            raise CorruptStateError("selected measurement branch has ~zero weight")
        keep = plus if outcome == 1 else ~plus
        self.idx = self.idx[keep]
        self.amp = self.amp[keep]
        self._renormalize()
        return outcome

    def _pivot_pairs(self, beta: int, delta: int, xi0_exp: int):
        """Pair entries over alpha <-> alpha^beta; returns (t, reps, w+, w-)."""
        t = (beta & -beta).bit_length() - 1
        bit = (self.idx >> np.uint64(t)) & np.uint64(1)
        reps = np.where(bit == 1, self.idx ^ np.uint64(beta), self.idx)
        reps = np.unique(reps)
        partners = reps ^ np.uint64(beta)
        v1 = self._lookup(reps)
        v2 = self._lookup(partners)
        xi_partner = _I_POWERS[xi0_exp] * backend.get().parity_pm(partners, delta)
        wp = v1 + xi_partner * v2
        wm = v1 - xi_partner * v2
        return t, reps, wp, wm

    def _measure_pivot(self, p: PauliString, beta: int, delta: int,
                       xi0_exp: int, u: float) -> int:
        _, reps, wp, wm = self._pivot_pairs(beta, delta, xi0_exp)
        prob_plus = float(0.5 * np.sum(np.abs(wp) ** 2))
        outcome = 1 if u < prob_plus else -1
        chosen = prob_plus if outcome == 1 else 1.0 - prob_plus
        if chosen < 1e-12:
            raise CorruptStateError("selected measurement branch has ~zero weight")
        w = wp if outcome == 1 else wm
        keep = np.abs(w) > PRUNE_THRESHOLD
        self.tableau.pivot_measure(p, outcome)
        # Representatives carry a cleared pivot bit, which is exactly their
        # index in the post-pivot basis.
        self.idx = reps[keep]
        self.amp = w[keep]
        self._renormalize()
        return outcome

    # -- analysis -----------------------------------------------------

    def coset_bound(self, support) -> CosetAnalysis:
        """Sparsity bound 2^(|Q| - r_Q) for a T-layer on the support Q."""
        q = frozenset(int(x) for x in support)
        if not q:
            raise ValueError("support must be non-empty")
        for x in q:
            if not 0 <= x < self.n:
                raise ValueError(f"qubit {x} out of range")
        qmask = 0
        for x in q:
            qmask |= 1 << x
        n = self.n
        # Kernel of the X-part of the stabilizer generator matrix gives the
        # Z-type subgroup; eliminate its projection outside Q to count the
        # elements supported inside Q.
        rows = [(int(self.tableau.xs[n + i]), int(self.tableau.zs[n + i]))
                for i in range(n)]
        work = [(x, 1 << i) for i, (x, _) in enumerate(rows)]
        pivots: list[tuple[int, int]] = []
        kernel_combos: list[int] = []
        for x, combo in work:
            for px, pc in pivots:
                if x & (px & -px):
                    x ^= px
                    combo ^= pc
            if x:
                pivots.append((x, combo))
            else:
                kernel_combos.append(combo)
        z_elems = []
        for combo in kernel_combos:
            z = 0
            c = combo
            while c:
                i = (c & -c).bit_length() - 1
                z ^= rows[i][1]
                c &= c - 1
            z_elems.append(z)
        z_dim = _gf2_rank(z_elems)
        outside = [z & ~qmask for z in z_elems]
        r_q = z_dim - _gf2_rank(outside)
        return CosetAnalysis(support=q, r_q=r_q, bound=1 << (len(q) - r_q))

    # -- dense expansion ----------------------------------------------

    def dense_statevector(self) -> np.ndarray:
        """Expand to a full 2^n state vector (n <= 14 guard).

        Basis index bit q corresponds to qubit q.
        """
        n = self.n
        if n > DENSE_MAX_QUBITS:
            raise ValueError(f"dense expansion limited to n <= {DENSE_MAX_QUBITS}")
        base = _expand_stabilizer_state(self.tableau)
        out = np.zeros(1 << n, dtype=np.complex128)
        for alpha, v in zip(self.idx, self.amp):
            vec = base
            a = int(alpha)
            while a:
                k = (a & -a).bit_length() - 1
                vec = _apply_packed_pauli_vec(vec, *self.tableau.destab_row(k), n)
                a &= a - 1
            out += v * vec
        norm = np.linalg.norm(out)
        if norm < 1e-9:
            raise CorruptStateError("dense expansion collapsed to zero")
        return out / norm

    # -- internals ----------------------------------------------------

    def _lookup(self, keys: np.ndarray) -> np.ndarray:
        pos = np.searchsorted(self.idx, keys)
        pos_clipped = np.minimum(pos, len(self.idx) - 1)
        found = self.idx[pos_clipped] == keys
        out = np.where(found, self.amp[pos_clipped], 0.0 + 0.0j)
        return out

    def _resort(self) -> None:
        order = np.argsort(self.idx, kind="stable")
        self.idx = self.idx[order]
        self.amp = self.amp[order]

    def _merge(self, cat_idx: np.ndarray, cat_amp: np.ndarray) -> None:
        uniq, inverse = np.unique(cat_idx, return_inverse=True)
        summed = np.zeros(len(uniq), dtype=np.complex128)
        np.add.at(summed, inverse, cat_amp)
        keep = np.abs(summed) > PRUNE_THRESHOLD
        uniq = uniq[keep]
        summed = summed[keep]
        if len(uniq) > self.capacity:
            raise CapacityError(len(uniq), self.capacity)
        if len(uniq) == 0:
            raise CorruptStateError("all amplitudes pruned to zero")
        self.idx = uniq
        self.amp = summed

    def _renormalize(self) -> None:
        if len(self.idx) == 0:
            raise CorruptStateError("post-measurement state is empty")
        self.amp = self.amp / math.sqrt(float(np.sum(np.abs(self.amp) ** 2)))


def init_zero(num_qubits: int, capacity: int = DEFAULT_CAPACITY) -> GenStabState:
    """The all-zeros computational basis state |0...0>."""
    return GenStabState(num_qubits, capacity=capacity)


def _gf2_rank(vecs) -> int:
    rank = 0
    pivots: list[int] = []
    for v in vecs:
        for p in pivots:
            v = min(v, v ^ p)
        if v:
            pivots.append(v)
            rank += 1
    return rank


def _apply_packed_pauli_vec(vec: np.ndarray, x: int, z: int, e: int,
                            n: int) -> np.ndarray:
    """Apply i^e * prod(letters) to a dense vector, exactly."""
    js = np.arange(1 << n, dtype=np.uint64)
    # Letter convention -> X^x Z^z convention adds i per Y.
    base = _I_POWERS[(e + (x & z).bit_count()) & 3]
    signs = 1.0 - 2.0 * (np.bitwise_count(js & np.uint64(z)) & np.uint64(1)).astype(np.float64)
    out = np.empty_like(vec)
    out[js ^ np.uint64(x)] = base * signs * vec
    return out


def _expand_stabilizer_state(t: Tableau) -> np.ndarray:
    """Dense |psi_S> from a tableau: collapse a copy to find one basis state
    in the support, then apply the stabilizer projectors."""
    n = t.n
    probe = t.copy()
    bits = 0
    for q in range(n):
        zq = 1 << q
        beta = probe.stab_anticommute_mask(0, zq)
        if beta == 0:
            sign = probe.diagonal_eigenvalue(PauliString(n, 0, zq, 0), 0)
            if sign < 0:
                bits |= 1 << q
        else:
            probe.pivot_measure(PauliString(n, 0, zq, 0), 1)
    vec = np.zeros(1 << n, dtype=np.complex128)
    vec[bits] = 1.0
    for i in range(n):
        vec = vec + _apply_packed_pauli_vec(vec, *t.stab_row(i), n)
        nrm = np.linalg.norm(vec)
        if nrm < 1e-12:
            raise CorruptStateError("projector product vanished")
        vec = vec / nrm
    return vec
