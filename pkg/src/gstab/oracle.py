"""Dense state-vector reference engine and lockstep cross-validation.

The sparse engine runs a shot while recording every random draw (sampled
Pauli errors and measurement outcomes).  The dense engine replays the same
trajectory instruction by instruction, projecting measurements onto the
forced outcomes, and the two state vectors are compared after every
instruction.  Comparison is global-phase insensitive (|inner product|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import CircuitProgram, Instruction, Rec, GATES_1Q, GATES_2Q, NOISE_OPS
from .pauli import PauliString
from .sampler import ShotContext, derive_seed, run_shot
from .state import GenStabState

DENSE_MAX_QUBITS = 14

_S2 = 1.0 / math.sqrt(2.0)
_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

GATE_MATRICES_1Q = {
    "I": np.eye(2, dtype=np.complex128),
    "X": _X,
    "Y": _Y,
    "Z": _Z,
    "H": _S2 * np.array([[1, 1], [1, -1]], dtype=np.complex128),
    "S": np.diag([1, 1j]).astype(np.complex128),
    "S_DAG": np.diag([1, -1j]).astype(np.complex128),
    "H_XY": _S2 * (_X + _Y),
    "H_NXY": _S2 * (_X - _Y),
    "T": np.diag([1, np.exp(1j * math.pi / 4)]).astype(np.complex128),
    "T_DAG": np.diag([1, np.exp(-1j * math.pi / 4)]).astype(np.complex128),
}

# basis index within the pair is 2 * bit(first target) + bit(second target)
GATE_MATRICES_2Q = {
    "CX": np.array([[1, 0, 0, 0], [0, 1, 0, 0],
                    [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.complex128),
    "CZ": np.diag([1, 1, 1, -1]).astype(np.complex128),
    "SWAP": np.array([[1, 0, 0, 0], [0, 0, 1, 0],
                      [0, 1, 0, 0], [0, 0, 0, 1]], dtype=np.complex128),
}

_I_POWERS = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)


class InconsistencyError(RuntimeError):
    """Dense replay disagrees with the recorded trajectory."""


class DenseState:
    """Full 2^n state vector; basis index bit q is qubit q."""

    def __init__(self, num_qubits: int):
        if not 1 <= num_qubits <= DENSE_MAX_QUBITS:
            raise ValueError(f"need 1 <= n <= {DENSE_MAX_QUBITS}")
        self.n = num_qubits
        self.vec = np.zeros(1 << num_qubits, dtype=np.complex128)
        self.vec[0] = 1.0

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def apply_1q(self, mat: np.ndarray, q: int) -> None:
        n = self.n
        t = self.vec.reshape([2] * n)
        ax = n - 1 - q
        t = np.moveaxis(t, ax, 0)
        shape = t.shape
        t = (mat @ t.reshape(2, -1)).reshape(shape)
        self.vec = np.ascontiguousarray(np.moveaxis(t, 0, ax)).reshape(-1)

    def apply_2q(self, mat: np.ndarray, qa: int, qb: int) -> None:
        n = self.n
        t = self.vec.reshape([2] * n)
        t = np.moveaxis(t, (n - 1 - qa, n - 1 - qb), (0, 1))
        shape = t.shape
        t = (mat @ t.reshape(4, -1)).reshape(shape)
        t = np.moveaxis(t, (0, 1), (n - 1 - qa, n - 1 - qb))
        self.vec = np.ascontiguousarray(t).reshape(-1)

    def apply_pauli(self, p: PauliString) -> None:
        x, z, e = p.x_bits, p.z_bits, p.phase_exp
        j = np.arange(1 << self.n, dtype=np.uint64)
        signs = 1.0 - 2.0 * (np.bitwise_count(j & np.uint64(z))
                             & np.uint64(1)).astype(np.float64)
        phase = _I_POWERS[(e + (x & z).bit_count()) & 3]
        out = np.empty_like(self.vec)
        out[j ^ np.uint64(x)] = phase * signs * self.vec
        self.vec = out

    def branch_probability_plus(self, p: PauliString) -> float:
        pv = self._pauli_applied(p)
        branch = 0.5 * (self.vec + pv)
        return float(np.vdot(branch, branch).real)

    def measure_forced(self, p: PauliString, outcome: int) -> float:
        """Project onto the forced eigenvalue (+1 or -1); returns the
        pre-projection branch probability."""
        pv = self._pauli_applied(p)
        branch = 0.5 * (self.vec + outcome * pv)
        prob = float(np.vdot(branch, branch).real)
        if prob < 1e-12:
            raise InconsistencyError(
                f"forced outcome {outcome:+d} has probability {prob:.3e}")
        self.vec = branch / math.sqrt(prob)
        return prob

    def _pauli_applied(self, p: PauliString) -> np.ndarray:
        x, z, e = p.x_bits, p.z_bits, p.phase_exp
        j = np.arange(1 << self.n, dtype=np.uint64)
        signs = 1.0 - 2.0 * (np.bitwise_count(j & np.uint64(z))
                             & np.uint64(1)).astype(np.float64)
        phase = _I_POWERS[(e + (x & z).bit_count()) & 3]
        out = np.empty_like(self.vec)
        out[j ^ np.uint64(x)] = phase * signs * self.vec
        return out


@dataclass
class ForcedStep:
    """Random draws recorded for one instruction of one shot."""
    paulis: list = field(default_factory=list)
    measurements: list = field(default_factory=list)  # (pauli, outcome, prob)


def dense_step(ds: DenseState, instr: Instruction, forced: ForcedStep,
               record: list[int]) -> list[float]:
    """Apply one instruction, consuming forced randomness; returns the dense
    branch probabilities of the forced measurement outcomes, in order."""
    name = instr.name
    probs: list[float] = []
    meas_iter = iter(forced.measurements)

    def forced_measure():
        p, outcome, _ = next(meas_iter)
        prob_plus = ds.branch_probability_plus(p)
        ds.measure_forced(p, outcome)
        probs.append(prob_plus if outcome == 1 else 1.0 - prob_plus)
        return 0 if outcome == 1 else 1

    if name in ("TICK", "QUBIT_COORDS", "SHIFT_COORDS"):
        pass
    elif name in NOISE_OPS:
        for p in forced.paulis:
            ds.apply_pauli(p)
    elif name in GATES_2Q:
        it = iter(instr.targets)
        for a, b in zip(it, it):
            if isinstance(a, Rec):
                if record[a.offset]:
                    fb = "X" if name == "CX" else "Z"
                    ds.apply_1q(GATE_MATRICES_1Q[fb], b)
            else:
                ds.apply_2q(GATE_MATRICES_2Q[name], a, b)
    elif name in ("X", "Z") and any(isinstance(t, Rec) for t in instr.targets):
        it = iter(instr.targets)
        for rec, q in zip(it, it):
            if record[rec.offset]:
                ds.apply_1q(GATE_MATRICES_1Q[name], q)
    elif name in GATES_1Q:
        for q in instr.targets:
            ds.apply_1q(GATE_MATRICES_1Q[name], q)
    elif name in ("M", "MR", "R"):
        for q in instr.targets:
            bit = forced_measure()
            if name != "R":
                record.append(bit)
            if name != "M" and bit:
                ds.apply_1q(_X, q)
    elif name == "MPP":
        if instr.args:
            raise InconsistencyError("noisy MPP is not replayable densely")
        for _ in instr.targets:
            record.append(forced_measure())
    elif name == "DETECTOR":
        pass
    elif name == "OBSERVABLE_INCLUDE":
        pass
    else:
        raise InconsistencyError(f"unexecutable instruction {name}")
    return probs


@dataclass
class CrosscheckReport:
    circuits: int
    shots: int
    max_infidelity: float
    max_prob_delta: float
    max_entries: int
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures and self.max_infidelity <= 1e-10

    def merge(self, other: "CrosscheckReport") -> "CrosscheckReport":
        return CrosscheckReport(
            circuits=self.circuits + other.circuits,
            shots=self.shots + other.shots,
            max_infidelity=max(self.max_infidelity, other.max_infidelity),
            max_prob_delta=max(self.max_prob_delta, other.max_prob_delta),
            max_entries=max(self.max_entries, other.max_entries),
            failures=self.failures + other.failures,
        )

    def as_dict(self) -> dict:
        return {
            "circuits": self.circuits,
            "shots": self.shots,
            "max_infidelity": self.max_infidelity,
            "max_prob_delta": self.max_prob_delta,
            "max_entries": self.max_entries,
            "failures": self.failures,
        }


class _LockstepObserver:
    """run_shot observer that replays every instruction on a dense state and
    compares the two vectors after each step."""

    def __init__(self, num_qubits: int):
        self.dense = DenseState(num_qubits)
        self.record: list[int] = []
        self.pending = ForcedStep()
        self.max_infidelity = 0.0
        self.max_prob_delta = 0.0
        self.max_entries = 1

    def on_random_pauli(self, instr_index: int, pauli: PauliString) -> None:
        self.pending.paulis.append(pauli)

    def on_measurement(self, instr_index: int, pauli: PauliString,
                       outcome: int, prob_plus: float) -> None:
        self.pending.measurements.append((pauli, outcome, prob_plus))

    def after_instruction(self, instr_index: int, instr: Instruction,
                          state: GenStabState) -> None:
        dense_probs = dense_step(self.dense, instr, self.pending, self.record)
        for (_, outcome, gen_prob_plus), dp in zip(
                self.pending.measurements, dense_probs):
            gen_prob = gen_prob_plus if outcome == 1 else 1.0 - gen_prob_plus
            self.max_prob_delta = max(self.max_prob_delta,
                                      abs(gen_prob - dp))
        self.pending = ForcedStep()
        gen_vec = state.dense_statevector()
        overlap = abs(np.vdot(self.dense.vec, gen_vec))
        self.max_infidelity = max(self.max_infidelity, 1.0 - overlap)
        self.max_entries = max(self.max_entries, state.entry_count)
        if 1.0 - overlap > 1e-8:
            raise InconsistencyError(
                f"instruction {instr_index} ({instr.name}): "
                f"fidelity dropped to {overlap:.12f}")


def crosscheck(prog: CircuitProgram, shots: int, seed: int,
               entry_capacity: int = 65536) -> CrosscheckReport:
    """Run each shot on the sparse engine while a dense twin replays the
    recorded randomness; report worst-case deviations."""
    if prog.num_qubits > DENSE_MAX_QUBITS:
        raise ValueError(f"crosscheck limited to n <= {DENSE_MAX_QUBITS}")
    ctx = ShotContext(prog.num_qubits, entry_capacity)
    max_inf = 0.0
    max_pd = 0.0
    max_entries = 1
    failures: list[dict] = []
    for shot in range(shots):
        ctx.reset(derive_seed(seed, shot))
        obs = _LockstepObserver(prog.num_qubits)
        try:
            run_shot(prog, ctx, postselect=False, observer=obs)
        except InconsistencyError as exc:
            failures.append({"shot": shot, "error": str(exc)})
        max_inf = max(max_inf, obs.max_infidelity)
        max_pd = max(max_pd, obs.max_prob_delta)
        max_entries = max(max_entries, obs.max_entries)
    return CrosscheckReport(circuits=1, shots=shots, max_infidelity=max_inf,
                            max_prob_delta=max_pd, max_entries=max_entries,
                            failures=failures)
