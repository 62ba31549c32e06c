"""Pauli algebra against a literal Kronecker-product oracle."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gstab.pauli import PauliError, PauliString, commutes_packed, mul_packed

from conftest import pauli_matrix


def all_single_qubit_paulis():
    for x in (0, 1):
        for z in (0, 1):
            for e in range(4):
                yield PauliString(1, x, z, e)


def test_single_qubit_products_match_dense():
    for p in all_single_qubit_paulis():
        for q in all_single_qubit_paulis():
            got = pauli_matrix(p * q)
            want = pauli_matrix(p) @ pauli_matrix(q)
            assert np.allclose(got, want), f"{p} * {q}"


def test_letter_products_textbook():
    X = PauliString.from_str("X")
    Y = PauliString.from_str("Y")
    Z = PauliString.from_str("Z")
    assert X * Y == PauliString.from_str("iZ")
    assert Y * X == PauliString.from_str("-iZ")
    assert Y * Z == PauliString.from_str("iX")
    assert Z * X == PauliString.from_str("iY")
    assert X * X == PauliString.from_str("I")
    assert Y * Y == PauliString.from_str("I")


def test_str_roundtrip_and_layout():
    p = PauliString.from_str("-iXYZ_")
    assert p.num_qubits == 4
    # qubit 0 is the leftmost letter
    assert p.x_bits == 0b0011
    assert p.z_bits == 0b0110
    assert p.phase_exp == 3
    assert str(p) == "-iXYZ_"
    assert PauliString.from_str(str(p)) == p


def test_constructors():
    assert PauliString.identity(3).is_identity
    s = PauliString.single(3, 1, "Y")
    assert str(s) == "+_Y_"
    assert s.weight() == 1
    with pytest.raises(PauliError):
        PauliString.single(3, 3, "X")
    with pytest.raises(PauliError):
        PauliString.from_str("XQ")
    with pytest.raises(PauliError):
        PauliString(2, x_bits=0b100)


@st.composite
def paulis(draw, max_qubits=8):
    n = draw(st.integers(1, max_qubits))
    return PauliString(n, draw(st.integers(0, (1 << n) - 1)),
                       draw(st.integers(0, (1 << n) - 1)),
                       draw(st.integers(0, 3)))


def same_size(pq):
    return pq[0].num_qubits == pq[1].num_qubits


@given(st.tuples(paulis(max_qubits=5), paulis(max_qubits=5)).filter(same_size))
@settings(max_examples=100)
def test_product_matches_dense(pq):
    p, q = pq
    assert np.allclose(pauli_matrix(p * q), pauli_matrix(p) @ pauli_matrix(q))


@given(st.tuples(paulis(max_qubits=6), paulis(max_qubits=6)).filter(same_size))
@settings(max_examples=100)
def test_commutation_matches_dense(pq):
    p, q = pq
    mp, mq = pauli_matrix(p), pauli_matrix(q)
    dense_commutes = np.allclose(mp @ mq, mq @ mp)
    assert p.commutes_with(q) == dense_commutes


@given(paulis())
@settings(max_examples=50)
def test_dagger_is_inverse(p):
    assert (p * p.dagger()).is_identity
    assert (p * p.dagger()).phase_exp == 0


@given(st.tuples(paulis(), paulis(), paulis()))
@settings(max_examples=50)
def test_packed_mul_associative(pqr):
    n = max(x.num_qubits for x in pqr)
    ps = [PauliString(n, x.x_bits, x.z_bits, x.phase_exp) for x in pqr]
    a, b, c = ps
    assert (a * b) * c == a * (b * c)


def test_hermitian_flag():
    assert PauliString.from_str("XY").is_hermitian
    assert not PauliString.from_str("iXY").is_hermitian


def test_commutes_packed_basic():
    # X vs Z on the same qubit anticommute; on different qubits commute
    assert not commutes_packed(1, 0, 0, 1)
    assert commutes_packed(1, 0, 0, 2)


def test_mul_packed_phase_is_mod4():
    x, z, e = mul_packed(1, 1, 0, 1, 1, 0)   # Y * Y = I
    assert (x, z, e) == (0, 0, 0)
