"""Shared dense-matrix oracles for the test suite.

These helpers rebuild every operator from literal 2x2 / 4x4 matrices and
Kronecker products, independent of the package's own dense engine, so they
can serve as a second opinion on both the sparse and the dense code paths.
"""

import numpy as np
import pytest

from gstab.pauli import PauliString

S2 = 1.0 / np.sqrt(2.0)

LETTER_MATS = {
    "I": np.eye(2, dtype=complex),
    "_": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

GATE_MATS_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": LETTER_MATS["X"],
    "Y": LETTER_MATS["Y"],
    "Z": LETTER_MATS["Z"],
    "H": S2 * np.array([[1, 1], [1, -1]], dtype=complex),
    "S": np.diag([1, 1j]).astype(complex),
    "S_DAG": np.diag([1, -1j]).astype(complex),
    "H_XY": S2 * (LETTER_MATS["X"] + LETTER_MATS["Y"]),
    "H_NXY": S2 * (LETTER_MATS["X"] - LETTER_MATS["Y"]),
    "T": np.diag([1, np.exp(1j * np.pi / 4)]).astype(complex),
    "T_DAG": np.diag([1, np.exp(-1j * np.pi / 4)]).astype(complex),
}

# 4x4 matrices in the basis |b_first b_second> of the two target qubits.
GATE_MATS_2Q = {
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                    [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex),
    "CZ": np.diag([1, 1, 1, -1]).astype(complex),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0],
                      [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex),
}

I4 = (1, 1j, -1, -1j)


def pauli_matrix(p: PauliString) -> np.ndarray:
    """Dense matrix of a PauliString; basis index bit q is qubit q."""
    m = np.array([[1]], dtype=complex)
    for q in reversed(range(p.num_qubits)):
        x = (p.x_bits >> q) & 1
        z = (p.z_bits >> q) & 1
        letter = {(0, 0): "I", (1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(x, z)]
        m = np.kron(m, LETTER_MATS[letter])
    return I4[p.phase_exp & 3] * m


def embed_1q(mat: np.ndarray, q: int, n: int) -> np.ndarray:
    m = np.array([[1]], dtype=complex)
    for k in reversed(range(n)):
        m = np.kron(m, mat if k == q else np.eye(2, dtype=complex))
    return m


def embed_2q(mat: np.ndarray, qa: int, qb: int, n: int) -> np.ndarray:
    """Embed a 4x4 operator acting on (qa, qb); qa is the first index bit."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        a = (col >> qa) & 1
        b = (col >> qb) & 1
        base = col & ~(1 << qa) & ~(1 << qb)
        src = 2 * a + b
        for dst in range(4):
            amp = mat[dst, src]
            if amp != 0:
                row = base | ((dst >> 1) << qa) | ((dst & 1) << qb)
                out[row, col] += amp
    return out


def random_pauli(rng, n: int) -> PauliString:
    mask = (1 << n) - 1
    return PauliString(n, rng.getrandbits(n) & mask, rng.getrandbits(n) & mask,
                       rng.randrange(4))


def fidelity(u: np.ndarray, v: np.ndarray) -> float:
    return abs(np.vdot(u, v)) / (np.linalg.norm(u) * np.linalg.norm(v))


# ----------------------------------------------------------------------
# Triangular color-code blocks (6.6.6 lattice) used for coset-bound tests.
# ----------------------------------------------------------------------

def color_code_faces(d: int) -> tuple[int, list[list[int]]]:
    """Triangular patch of the hexagonal 3-colorable lattice.

    Returns (num_qubits, faces); each face doubles as an X-type and Z-type
    check.  d=3 gives the [[7,1,3]] code, d=5 the [[19,1,5]] code.
    """
    rows = 3 * (d - 1) // 2 + 1
    sites = [(r, c) for r in range(rows) for c in range(r + 1)]
    plaqs = [s for s in sites if (s[0] + s[1]) % 3 == 1]
    qubits = [s for s in sites if s not in plaqs]
    qidx = {s: i for i, s in enumerate(qubits)}
    faces = []
    for (r, c) in plaqs:
        nbrs = [(r - 1, c - 1), (r - 1, c), (r, c - 1),
                (r, c + 1), (r + 1, c), (r + 1, c + 1)]
        faces.append(sorted(qidx[s] for s in nbrs if s in qidx))
    return len(qubits), faces


@pytest.fixture
def np_rng():
    return np.random.default_rng(20260825)
