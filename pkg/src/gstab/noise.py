"""Stochastic Pauli noise channels and the uniform depolarizing transformer.

The transformer inserts, with strength p: DEPOLARIZE1 after every
single-qubit gate, DEPOLARIZE2 after every two-qubit gate, DEPOLARIZE1 on
qubits idle during a TICK-delimited layer, X_ERROR before Z-basis
measurements (M, MR), and X_ERROR after resets (R, and the reset half of MR).

Sampling consumes a fixed number of RNG draws per channel regardless of
whether an error fires, so trajectories replay bit-identically.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import (
    Block,
    CircuitProgram,
    Instruction,
    PauliProduct,
    Rec,
    GATES_1Q,
    GATES_2Q,
    NOISE_OPS,
)
from .pauli import PauliString

_KINDS = ("DEPOLARIZE1", "DEPOLARIZE2", "X_ERROR", "Z_ERROR")

# letter codes 1..3 as (x, z) bit pairs
_CODE_BITS = {1: (1, 0), 2: (1, 1), 3: (0, 1)}


class NoiseModelError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseOp:
    kind: str
    targets: tuple[int, ...]
    p: float

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise NoiseModelError(f"unknown noise kind {self.kind!r}")
        if not 0.0 <= self.p <= 1.0:
            raise NoiseModelError(f"probability {self.p} out of range")
        if self.kind == "DEPOLARIZE2":
            if len(self.targets) == 0 or len(self.targets) % 2:
                raise NoiseModelError("DEPOLARIZE2 needs qubit pairs")
        elif not self.targets:
            raise NoiseModelError("noise op needs at least one target")

    @classmethod
    def from_instruction(cls, instr: Instruction) -> "NoiseOp":
        return cls(kind=instr.name, targets=instr.targets, p=instr.args[0])


def sample_noise(op: NoiseOp, num_qubits: int, rand) -> PauliString:
    """Draw one error realization; ``rand()`` yields uniforms in [0,1).

    Draw counts are fixed per kind: 2 per DEPOLARIZE1 target, 2 per
    DEPOLARIZE2 pair, 1 per X_ERROR/Z_ERROR target.
    """
    x = 0
    z = 0
    if op.kind == "DEPOLARIZE1":
        for q in op.targets:
            fire = rand() < op.p
            code = 1 + int(rand() * 3)
            if fire:
                bx, bz = _CODE_BITS[min(code, 3)]
                x |= bx << q
                z |= bz << q
    elif op.kind == "DEPOLARIZE2":
        it = iter(op.targets)
        for a, b in zip(it, it):
            fire = rand() < op.p
            pick = 1 + int(rand() * 15)
            pick = min(pick, 15)
            if fire:
                ca = pick & 3
                cb = pick >> 2
                if ca:
                    bx, bz = _CODE_BITS[ca]
                    x |= bx << a
                    z |= bz << a
                if cb:
                    bx, bz = _CODE_BITS[cb]
                    x |= bx << b
                    z |= bz << b
    elif op.kind == "X_ERROR":
        for q in op.targets:
            if rand() < op.p:
                x |= 1 << q
    elif op.kind == "Z_ERROR":
        for q in op.targets:
            if rand() < op.p:
                z |= 1 << q
    return PauliString(num_qubits, x, z, 0)


def apply_noise_model(prog: CircuitProgram, p: float) -> CircuitProgram:
    """Insert uniform depolarizing noise of strength p into a noiseless
    program.  With p = 0 the program is returned unchanged, keeping
    trajectories identical to the noiseless original."""
    if not 0.0 <= p <= 1.0:
        raise NoiseModelError(f"probability {p} out of range")
    if prog.has_noise():
        raise NoiseModelError("program already contains noise instructions")
    if p == 0.0:
        return prog
    declared = _declared_qubits(prog)
    body = _transform_body(prog.body, p, declared)
    return CircuitProgram(body=tuple(body), num_qubits=prog.num_qubits,
                          num_measurements=prog.num_measurements)


def _declared_qubits(prog: CircuitProgram) -> frozenset[int]:
    touched: set[int] = set()
    for instr in prog.flat():
        for t in instr.targets:
            if isinstance(t, int):
                touched.add(t)
            elif isinstance(t, PauliProduct):
                touched.update(t.qubits())
    return frozenset(touched)


def _transform_body(body, p: float, declared: frozenset[int]) -> list:
    out: list = []
    layer_active: set[int] = set()
    layer_has_ops = False

    def flush_layer():
        nonlocal layer_has_ops
        if layer_has_ops:
            idle = sorted(declared - layer_active)
            if idle:
                out.append(Instruction("DEPOLARIZE1", tuple(idle), (p,)))
        layer_active.clear()
        layer_has_ops = False

    for item in body:
        if isinstance(item, Block):
            flush_layer()
            inner = _transform_body(item.body, p, declared)
            out.append(Block(count=item.count, body=tuple(inner)))
            continue
        name = item.name
        if name == "TICK":
            flush_layer()
            out.append(item)
            continue
        if name in ("DETECTOR", "OBSERVABLE_INCLUDE", "QUBIT_COORDS",
                    "SHIFT_COORDS"):
            out.append(item)
            continue
        is_feedback = any(isinstance(t, Rec) for t in item.targets)
        if is_feedback:
            # Conditioned Pauli corrections are classical frame updates:
            # no gate noise, and they do not count as activity.
            out.append(item)
            continue
        if name == "MPP":
            # Pauli-product measurements stay noiseless unless an explicit
            # flip argument is attached by hand.
            layer_has_ops = True
            for t in item.targets:
                layer_active.update(t.qubits())
            out.append(item)
            continue
        qubits = [t for t in item.targets if isinstance(t, int)]
        layer_active.update(qubits)
        layer_has_ops = True
        if name in ("M", "MR"):
            out.append(Instruction("X_ERROR", tuple(qubits), (p,)))
            out.append(item)
            if name == "MR":
                out.append(Instruction("X_ERROR", tuple(qubits), (p,)))
        elif name == "R":
            out.append(item)
            out.append(Instruction("X_ERROR", tuple(qubits), (p,)))
        elif name in GATES_2Q:
            out.append(item)
            out.append(Instruction("DEPOLARIZE2", item.targets, (p,)))
        elif name in GATES_1Q:
            out.append(item)
            out.append(Instruction("DEPOLARIZE1", item.targets, (p,)))
        else:
            out.append(item)
    flush_layer()
    return out
