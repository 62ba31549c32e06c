"""Dense reference engine and sparse/dense lockstep validation."""

import math
import random

import numpy as np
import pytest

import gstab.oracle as oracle
from gstab.circuit import Instruction, parse_circuit
from gstab.fuzz import generate_suite
from gstab.oracle import (
    DenseState,
    ForcedStep,
    InconsistencyError,
    crosscheck,
    dense_step,
)
from gstab.pauli import PauliString

from conftest import GATE_MATS_1Q, GATE_MATS_2Q, embed_1q, embed_2q, pauli_matrix


def test_dense_gates_match_kron_oracle(np_rng):
    n = 4
    for name, mat in GATE_MATS_1Q.items():
        vec = np_rng.normal(size=1 << n) + 1j * np_rng.normal(size=1 << n)
        vec /= np.linalg.norm(vec)
        q = int(np_rng.integers(n))
        ds = DenseState(n)
        ds.vec = vec.copy()
        ds.apply_1q(oracle.GATE_MATRICES_1Q[name], q)
        assert np.allclose(ds.vec, embed_1q(mat, q, n) @ vec), name
    for name, mat in GATE_MATS_2Q.items():
        vec = np_rng.normal(size=1 << n) + 1j * np_rng.normal(size=1 << n)
        vec /= np.linalg.norm(vec)
        qa, qb = [int(x) for x in np_rng.choice(n, size=2, replace=False)]
        ds = DenseState(n)
        ds.vec = vec.copy()
        ds.apply_2q(oracle.GATE_MATRICES_2Q[name], qa, qb)
        assert np.allclose(ds.vec, embed_2q(mat, qa, qb, n) @ vec), name


def test_dense_pauli_matches_matrix(np_rng):
    n = 3
    rng = random.Random(4)
    for _ in range(20):
        p = PauliString(n, rng.getrandbits(n), rng.getrandbits(n),
                        rng.randrange(4))
        vec = np_rng.normal(size=1 << n) + 1j * np_rng.normal(size=1 << n)
        ds = DenseState(n)
        ds.vec = vec.copy()
        ds.apply_pauli(p)
        assert np.allclose(ds.vec, pauli_matrix(p) @ vec)


def test_h_then_t_amplitudes():
    ds = DenseState(1)
    ds.apply_1q(oracle.GATE_MATRICES_1Q["H"], 0)
    assert np.allclose(ds.vec, [2 ** -0.5, 2 ** -0.5])
    ds.apply_1q(oracle.GATE_MATRICES_1Q["T"], 0)
    assert np.allclose(ds.vec,
                       [2 ** -0.5, np.exp(1j * math.pi / 4) * 2 ** -0.5])


def test_norm_conserved_over_many_ops(np_rng):
    rng = random.Random(8)
    ds = DenseState(5)
    names_1q = list(oracle.GATE_MATRICES_1Q)
    names_2q = list(oracle.GATE_MATRICES_2Q)
    for _ in range(1000):
        if rng.random() < 0.7:
            ds.apply_1q(oracle.GATE_MATRICES_1Q[rng.choice(names_1q)],
                        rng.randrange(5))
        else:
            a, b = rng.sample(range(5), 2)
            ds.apply_2q(oracle.GATE_MATRICES_2Q[rng.choice(names_2q)], a, b)
    assert abs(ds.norm() - 1.0) < 1e-10


def test_measure_forced_probability():
    ds = DenseState(1)
    ds.apply_1q(oracle.GATE_MATRICES_1Q["H"], 0)
    z = PauliString.from_str("Z")
    assert ds.branch_probability_plus(z) == pytest.approx(0.5)
    prob = ds.measure_forced(z, -1)
    assert prob == pytest.approx(0.5)
    assert np.allclose(ds.vec, [0, 1])
    with pytest.raises(InconsistencyError):
        ds.measure_forced(z, 1)


def test_dense_step_runs_gates_and_measurements():
    ds = DenseState(2)
    record = []
    dense_step(ds, Instruction("H", (0,)), ForcedStep(), record)
    dense_step(ds, Instruction("CX", (0, 1)), ForcedStep(), record)
    forced = ForcedStep(measurements=[(PauliString.from_str("Z_"), -1, 0.5)])
    probs = dense_step(ds, Instruction("M", (0,)), forced, record)
    assert probs == [pytest.approx(0.5)]
    assert record == [1]
    assert np.allclose(np.abs(ds.vec), [0, 0, 0, 1])


def test_crosscheck_bell():
    prog = parse_circuit("H 0\nCX 0 1\nM 0\nM 1\n")
    rep = crosscheck(prog, 10, seed=1)
    assert rep.ok
    assert rep.max_infidelity <= 1e-12
    assert rep.max_prob_delta <= 1e-12


def test_crosscheck_stabilizer_circuits_stay_rank_one():
    suite = generate_suite(55, 10, max_t=0)
    for i, prog in enumerate(suite):
        rep = crosscheck(prog, 2, seed=i)
        assert rep.ok, rep.failures
        assert rep.max_entries == 1


def test_crosscheck_detects_mutation(monkeypatch):
    # corrupt the dense twin's S gate; the lockstep must notice and locate it
    bad = oracle.GATE_MATRICES_1Q["S"].copy()
    bad[1, 1] = -1j
    monkeypatch.setitem(oracle.GATE_MATRICES_1Q, "S", bad)
    prog = parse_circuit("H 0\nS 0\nH 0\nM 0\n")
    rep = crosscheck(prog, 3, seed=0)
    assert not rep.ok
    assert rep.failures
    assert "instruction 1" in rep.failures[0]["error"]


def test_crosscheck_rejects_large_circuits():
    prog = parse_circuit("H 14\nM 14\n")   # 15 qubits
    with pytest.raises(ValueError):
        crosscheck(prog, 1, seed=0)


def test_dense_state_bounds():
    with pytest.raises(ValueError):
        DenseState(0)
    with pytest.raises(ValueError):
        DenseState(15)
