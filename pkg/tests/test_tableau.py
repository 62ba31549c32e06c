"""Tableau conjugation, decomposition, and pivot updates vs dense matrices."""

import random

import numpy as np
import pytest

from gstab.pauli import PauliString
from gstab.tableau import GATE_CODES, Tableau, TableauError, TWO_QUBIT_GATES

from conftest import GATE_MATS_1Q, GATE_MATS_2Q, embed_1q, embed_2q, pauli_matrix

ALL_GATES = [g for g in GATE_CODES]


def random_tableau(rng: random.Random, n: int, depth: int = 20) -> Tableau:
    t = Tableau(n)
    for _ in range(depth):
        g = rng.choice(ALL_GATES)
        if g in TWO_QUBIT_GATES:
            if n < 2:
                continue
            t.conjugate_gate(g, tuple(rng.sample(range(n), 2)))
        else:
            t.conjugate_gate(g, (rng.randrange(n),))
    return t


def gate_unitary(gate: str, targets, n: int) -> np.ndarray:
    if gate in TWO_QUBIT_GATES:
        return embed_2q(GATE_MATS_2Q[gate], targets[0], targets[1], n)
    return embed_1q(GATE_MATS_1Q[gate], targets[0], n)


def test_initial_rows():
    t = Tableau(3)
    for q in range(3):
        assert str(t.stab(q)) == "+" + "".join(
            "Z" if k == q else "_" for k in range(3))
        assert str(t.destab(q)) == "+" + "".join(
            "X" if k == q else "_" for k in range(3))
    t.check_invariants()


@pytest.mark.parametrize("gate", ALL_GATES)
def test_conjugation_matches_dense(gate):
    rng = random.Random(hash(gate) & 0xFFFF)
    n = 3
    for trial in range(10):
        t = random_tableau(rng, n)
        if gate in TWO_QUBIT_GATES:
            targets = tuple(rng.sample(range(n), 2))
        else:
            targets = (rng.randrange(n),)
        u = gate_unitary(gate, targets, n)
        before = [t.stab(i) for i in range(n)] + [t.destab(i) for i in range(n)]
        t.conjugate_gate(gate, targets)
        after = [t.stab(i) for i in range(n)] + [t.destab(i) for i in range(n)]
        for b, a in zip(before, after):
            want = u @ pauli_matrix(b) @ u.conj().T
            assert np.allclose(pauli_matrix(a), want), (gate, targets, b, a)
        t.check_invariants()


def test_invariants_hold_after_long_random_circuits():
    rng = random.Random(11)
    for n in (1, 2, 5, 8):
        t = random_tableau(rng, n, depth=200)
        t.check_invariants()


def test_pauli_action_reconstructs_the_operator():
    # Q == i^{xi0} * (-1)^{...} * d_beta * (stabilizer product): check the
    # group-theoretic identity Q = i^{xi0_exp} * d_beta * s_gamma directly.
    rng = random.Random(5)
    n = 4
    for _ in range(40):
        t = random_tableau(rng, n, depth=30)
        q = PauliString(n, rng.getrandbits(n), rng.getrandbits(n),
                        rng.randrange(4))
        beta, delta, xi0_exp = t.pauli_action(q.x_bits, q.z_bits, q.phase_exp)
        # beta/delta are the anticommutation masks
        for i in range(n):
            assert ((beta >> i) & 1) == (not q.commutes_with(t.stab(i)))
            assert ((delta >> i) & 1) == (not q.commutes_with(t.destab(i)))
        # rebuild d_beta^dagger Q and check it is i^{xi0_exp} x (stab product)
        r = PauliString.identity(n)
        for i in range(n):
            if (beta >> i) & 1:
                r = t.destab(i) * r
        r = r.dagger() * q
        m = pauli_matrix(r)
        # project onto the stabilizer group: must equal i^{xi0} times a
        # product of stabilizer matrices
        prod = np.eye(1 << n, dtype=complex)
        for i in range(n):
            if not r.commutes_with(t.destab(i)):
                prod = prod @ pauli_matrix(t.stab(i))
        want = (1j ** xi0_exp) * prod
        assert np.allclose(m, want)


def test_diagonal_eigenvalue_on_stabilizers():
    rng = random.Random(9)
    n = 4
    for _ in range(20):
        t = random_tableau(rng, n, depth=25)
        # any stabilizer has eigenvalue +1 on alpha=0 and flips sign with
        # the paired destabilizer bit
        i = rng.randrange(n)
        s = t.stab(i)
        assert t.diagonal_eigenvalue(s, 0) == 1
        assert t.diagonal_eigenvalue(s, 1 << i) == -1
        other = (i + 1) % n
        assert t.diagonal_eigenvalue(s, 1 << other) == 1


def test_diagonal_eigenvalue_rejects_nonmembers():
    t = Tableau(2)
    with pytest.raises(TableauError):
        t.diagonal_eigenvalue(PauliString.from_str("X_"), 0)


def test_pivot_measure_updates_rows():
    t = Tableau(2)
    t.conjugate_gate("H", (0,))
    t.conjugate_gate("CX", (0, 1))
    # Bell stabilizers: XX, ZZ.  Measure Z on qubit 0: anticommutes with XX.
    p = PauliString.from_str("Z_")
    old_stabs = {str(t.stab(i)) for i in range(2)}
    assert "+XX" in old_stabs
    pivot = t.pivot_measure(p, -1)
    t.check_invariants()
    assert t.stab(pivot) == PauliString(2, p.x_bits, p.z_bits, 2)
    assert str(t.destab(pivot)) == "+XX"


def test_pivot_measure_requires_anticommuting():
    t = Tableau(1)
    with pytest.raises(TableauError):
        t.pivot_measure(PauliString.from_str("Z"), 1)


def test_gate_validation():
    t = Tableau(2)
    with pytest.raises(TableauError):
        t.conjugate_gate("CX", (0,))
    with pytest.raises(TableauError):
        t.conjugate_gate("H", (0, 1))
    with pytest.raises(TableauError):
        t.conjugate_gate("CX", (0, 0))
    with pytest.raises(TableauError):
        t.conjugate_gate("H", (2,))
    with pytest.raises(TableauError):
        t.conjugate_gate("FOO", (0,))


def test_max_qubits_cap():
    Tableau(64)
    with pytest.raises(TableauError):
        Tableau(65)


def test_dump_mentions_all_rows():
    t = Tableau(2)
    text = t.dump()
    assert "+Z_" in text and "+X_" in text
