"""Circuit text parser and instruction IR (Stim-compatible subset + T/T_DAG).

Grammar, one instruction per line:

    NAME[(arg, ...)] target target ...
    REPEAT count { ... }          # blocks nest
    # comment

Targets are qubit indices, record lookbacks ``rec[-k]`` (k >= 1), or Pauli
product terms like ``X0*Z3`` (MPP only).  Qubit count is inferred as
1 + max target index.  Record bit convention: 1 means the -1 eigenvalue was
observed.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

GATES_1Q = ("I", "X", "Y", "Z", "H", "S", "S_DAG", "H_XY", "H_NXY", "T", "T_DAG")
GATES_2Q = ("CX", "CZ", "SWAP")
NOISE_OPS = ("DEPOLARIZE1", "DEPOLARIZE2", "X_ERROR", "Z_ERROR")
MEASURE_OPS = ("M", "MR", "MPP")
ANNOTATIONS = ("DETECTOR", "OBSERVABLE_INCLUDE", "TICK",
               "QUBIT_COORDS", "SHIFT_COORDS")
FEEDBACK_GATES = ("CX", "CZ", "X", "Z")

KNOWN_OPS = frozenset(GATES_1Q) | frozenset(GATES_2Q) | frozenset(NOISE_OPS) \
    | frozenset(MEASURE_OPS) | frozenset(ANNOTATIONS) | {"R"}

_REC_RE = re.compile(r"^rec\[(-\d+)\]$")
_PRODUCT_RE = re.compile(r"^([XYZ]\d+)(\*[XYZ]\d+)*$")
_NAME_RE = re.compile(r"^([A-Z_0-9]+)(?:\(([^)]*)\))?$")


class ParseError(ValueError):
    """Parse failure; carries a 1-based line number."""

    def __init__(self, line_num: int, message: str):
        super().__init__(f"line {line_num}: {message}")
        self.line_num = line_num


@dataclass(frozen=True)
class Rec:
    """A measurement-record lookback target; offset is strictly negative."""
    offset: int

    def __str__(self) -> str:
        return f"rec[{self.offset}]"


@dataclass(frozen=True)
class PauliProduct:
    """An MPP target: ((qubit, letter), ...) in written order."""
    terms: tuple[tuple[int, str], ...]

    def __str__(self) -> str:
        return "*".join(f"{letter}{q}" for q, letter in self.terms)

    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.terms)


@dataclass(frozen=True)
class Instruction:
    name: str
    targets: tuple = ()
    args: tuple = ()
    line: int = field(default=0, compare=False, repr=False)

    def __str__(self) -> str:
        out = self.name
        if self.args:
            out += "(" + ", ".join(_fmt_arg(a) for a in self.args) + ")"
        for t in self.targets:
            out += " " + str(t)
        return out


@dataclass(frozen=True)
class Block:
    """A REPEAT block."""
    count: int
    body: tuple
    line: int = field(default=0, compare=False, repr=False)


@dataclass(frozen=True)
class CircuitProgram:
    body: tuple
    num_qubits: int
    num_measurements: int

    def flat(self):
        """Iterate instructions with REPEAT blocks expanded."""
        yield from _flatten(self.body)

    def serialize(self) -> str:
        lines: list[str] = []
        _serialize_into(self.body, lines, 0)
        return "\n".join(lines) + "\n"

    @property
    def detectors(self) -> list[tuple[int, ...]]:
        """Absolute measurement indices referenced by each detector, in
        execution order."""
        dets, _ = self._resolve_annotations()
        return dets

    @property
    def observables(self) -> dict[int, tuple[int, ...]]:
        _, obs = self._resolve_annotations()
        return {k: tuple(sorted(v)) for k, v in obs.items()}

    def _resolve_annotations(self):
        dets: list[tuple[int, ...]] = []
        obs: dict[int, list[int]] = {}
        m = 0
        for instr in self.flat():
            if instr.name in ("M", "MR"):
                m += len(instr.targets)
            elif instr.name == "MPP":
                m += len(instr.targets)
            elif instr.name == "DETECTOR":
                dets.append(tuple(m + t.offset for t in instr.targets))
            elif instr.name == "OBSERVABLE_INCLUDE":
                key = int(instr.args[0]) if instr.args else 0
                obs.setdefault(key, []).extend(m + t.offset for t in instr.targets)
        return dets, obs

    def has_noise(self) -> bool:
        return any(i.name in NOISE_OPS or (i.name == "MPP" and i.args)
                   for i in self.flat())


@dataclass(frozen=True)
class CircuitStats:
    total_qubits: int
    total_gates: int
    depth: int
    two_qubit_gates: int
    measurements: int
    t_count: int
    t_support_size: int
    t_depth: int

    def as_dict(self) -> dict:
        return {
            "total_qubits": self.total_qubits,
            "total_gates": self.total_gates,
            "depth": self.depth,
            "two_qubit_gates": self.two_qubit_gates,
            "measurements": self.measurements,
            "t_count": self.t_count,
            "t_support_size": self.t_support_size,
            "t_depth": self.t_depth,
        }


def _fmt_arg(a) -> str:
    if float(a) == int(a):
        return str(int(a))
    return repr(float(a))


def _flatten(body):
    for item in body:
        if isinstance(item, Block):
            for _ in range(item.count):
                yield from _flatten(item.body)
        else:
            yield item


def _serialize_into(body, lines: list[str], depth: int) -> None:
    pad = "    " * depth
    for item in body:
        if isinstance(item, Block):
            lines.append(f"{pad}REPEAT {item.count} {{")
            _serialize_into(item.body, lines, depth + 1)
            lines.append(f"{pad}}}")
        else:
            lines.append(pad + str(item))


# ----------------------------------------------------------------------
# Parsing
# ----------------------------------------------------------------------

def parse_circuit(text: str) -> CircuitProgram:
    lines = text.splitlines()
    body, next_line = _parse_body(lines, 0, top_level=True)
    program_body = tuple(body)
    max_q = -1
    for instr in _flatten(program_body):
        for t in instr.targets:
            if isinstance(t, int):
                max_q = max(max_q, t)
            elif isinstance(t, PauliProduct):
                max_q = max(max_q, *t.qubits())
    num_qubits = max_q + 1
    num_measurements = _validate_stream(program_body)
    return CircuitProgram(body=program_body, num_qubits=num_qubits,
                          num_measurements=num_measurements)


def _parse_body(lines: list[str], start: int, top_level: bool):
    body: list = []
    i = start
    while i < len(lines):
        raw = lines[i]
        stripped = raw.split("#", 1)[0].strip()
        line_num = i + 1
        if not stripped:
            i += 1
            continue
        if stripped == "}":
            if top_level:
                raise ParseError(line_num, "unbalanced '}'")
            return body, i + 1
        if stripped.startswith("REPEAT"):
            m = re.match(r"^REPEAT\s+(\d+)\s*\{$", stripped)
            if m is None:
                raise ParseError(line_num, "malformed REPEAT header "
                                 "(expected 'REPEAT n {')")
            count = int(m.group(1))
            if count < 1:
                raise ParseError(line_num, "REPEAT count must be >= 1")
            inner, i = _parse_body(lines, i + 1, top_level=False)
            body.append(Block(count=count, body=tuple(inner), line=line_num))
            continue
        body.append(_parse_instruction(stripped, line_num))
        i += 1
    if not top_level:
        raise ParseError(len(lines), "unbalanced '{': block never closed")
    return body, i


def _parse_instruction(text: str, line_num: int) -> Instruction:
    parts = text.split()
    m = _NAME_RE.match(parts[0])
    if m is None:
        raise ParseError(line_num, f"malformed opcode {parts[0]!r}")
    name = m.group(1)
    if name not in KNOWN_OPS:
        raise ParseError(line_num, f"unknown opcode {name!r}")
    args: tuple = ()
    if m.group(2) is not None:
        try:
            args = tuple(float(a) for a in m.group(2).split(",") if a.strip())
        except ValueError:
            raise ParseError(line_num, f"malformed arguments in {parts[0]!r}")
    targets = tuple(_parse_target(tok, name, line_num) for tok in parts[1:])
    _check_shape(name, targets, args, line_num)
    return Instruction(name=name, targets=targets, args=args, line=line_num)


def _parse_target(tok: str, opcode: str, line_num: int):
    rec = _REC_RE.match(tok)
    if rec:
        offset = int(rec.group(1))
        if offset >= 0:
            raise ParseError(line_num, f"lookback must be negative: {tok}")
        return Rec(offset)
    if tok.isdigit():
        return int(tok)
    if opcode == "MPP" and _PRODUCT_RE.match(tok):
        terms = []
        for atom in tok.split("*"):
            terms.append((int(atom[1:]), atom[0]))
        if len({q for q, _ in terms}) != len(terms):
            raise ParseError(line_num, f"repeated qubit in product {tok!r}")
        return PauliProduct(terms=tuple(terms))
    raise ParseError(line_num, f"malformed target {tok!r}")


def _check_shape(name: str, targets: tuple, args: tuple, line_num: int) -> None:
    recs = [t for t in targets if isinstance(t, Rec)]
    prods = [t for t in targets if isinstance(t, PauliProduct)]
    if name == "TICK" or name == "SHIFT_COORDS":
        if targets:
            raise ParseError(line_num, f"{name} takes no targets")
        return
    if name in ("DETECTOR", "OBSERVABLE_INCLUDE"):
        if len(recs) != len(targets):
            raise ParseError(line_num, f"{name} targets must be lookbacks")
        return
    if name == "QUBIT_COORDS":
        if len(targets) != 1 or not isinstance(targets[0], int):
            raise ParseError(line_num, "QUBIT_COORDS takes one qubit target")
        return
    if name == "MPP":
        if not targets or len(prods) != len(targets):
            raise ParseError(line_num, "MPP targets must be Pauli products")
        return
    if prods:
        raise ParseError(line_num, f"{name} cannot take Pauli products")
    if name in NOISE_OPS:
        if len(args) != 1 or not 0.0 <= args[0] <= 1.0:
            raise ParseError(line_num, f"{name} needs one probability argument")
        if recs:
            raise ParseError(line_num, f"{name} targets must be qubits")
        if name == "DEPOLARIZE2":
            if len(targets) == 0 or len(targets) % 2:
                raise ParseError(line_num, "DEPOLARIZE2 needs qubit pairs")
        elif not targets:
            raise ParseError(line_num, f"{name} needs at least one target")
        return
    if not targets:
        raise ParseError(line_num, f"{name} needs targets")
    if name in GATES_2Q:
        if len(targets) % 2:
            raise ParseError(line_num, f"{name} needs target pairs")
        for a, b in _pairs(targets):
            if isinstance(b, Rec):
                raise ParseError(line_num,
                                 "lookback allowed only as a control")
            if isinstance(a, int) and a == b:
                raise ParseError(line_num, f"duplicate target {a}")
        return
    if name in ("X", "Z") and recs:
        if len(targets) % 2:
            raise ParseError(line_num,
                             f"conditional {name} needs (rec, qubit) pairs")
        for a, b in _pairs(targets):
            if not isinstance(a, Rec) or not isinstance(b, int):
                raise ParseError(line_num,
                                 f"conditional {name} needs (rec, qubit) pairs")
        return
    if recs:
        raise ParseError(line_num, f"{name} targets must be qubits")


def _pairs(targets):
    it = iter(targets)
    return zip(it, it)


def _validate_stream(body) -> int:
    """Check lookbacks resolve at their execution point; count measurements.

    Inside a REPEAT body the first iteration sees the fewest prior
    measurements, so validating one pass per block is the strict case.
    """

    def walk(items, m: int) -> int:
        for item in items:
            if isinstance(item, Block):
                m_after = walk(item.body, m)
                m += item.count * (m_after - m)
                continue
            for t in item.targets:
                if isinstance(t, Rec) and -t.offset > m:
                    raise ParseError(
                        item.line,
                        f"lookback {t} resolves before any of the {m} "
                        "measurements made so far")
            if item.name in ("M", "MR", "MPP"):
                m += len(item.targets)
        return m

    def count_meas(items) -> int:
        total = 0
        for item in items:
            if isinstance(item, Block):
                total += item.count * count_meas(item.body)
            elif item.name in ("M", "MR", "MPP"):
                total += len(item.targets)
        return total

    walk(body, 0)
    return count_meas(body)


# ----------------------------------------------------------------------
# Semantics helpers
# ----------------------------------------------------------------------

def resolve_detector(lookbacks, record) -> int:
    """XOR of the referenced record bits; 1 means the detector fires."""
    parity = 0
    for lb in lookbacks:
        k = lb.offset if isinstance(lb, Rec) else int(lb)
        if k >= 0 or -k > len(record):
            raise IndexError(f"lookback {k} out of range for record of "
                             f"length {len(record)}")
        parity ^= record[k]
    return parity


def compute_stats(prog: CircuitProgram) -> CircuitStats:
    """Circuit statistics; noise ops, annotations, and record-conditioned
    operations are excluded from gate counts.  Depth counts TICK-delimited
    layers that contain at least one gate, measurement, or reset; T-depth
    counts layers containing T/T_DAG."""
    gates_1q = 0
    gates_2q = 0
    meas = 0
    t_count = 0
    t_support: set[int] = set()
    depth = 0
    t_depth = 0
    layer_active = False
    layer_has_t = False

    def close_layer():
        nonlocal depth, t_depth, layer_active, layer_has_t
        if layer_active:
            depth += 1
            if layer_has_t:
                t_depth += 1
        layer_active = False
        layer_has_t = False

    for instr in prog.flat():
        name = instr.name
        if name == "TICK":
            close_layer()
            continue
        if name in NOISE_OPS or name in ("DETECTOR", "OBSERVABLE_INCLUDE",
                                         "QUBIT_COORDS", "SHIFT_COORDS"):
            continue
        if any(isinstance(t, Rec) for t in instr.targets):
            continue
        if name in GATES_2Q:
            gates_2q += len(instr.targets) // 2
            layer_active = True
        elif name in ("T", "T_DAG"):
            t_count += len(instr.targets)
            t_support.update(instr.targets)
            gates_1q += len(instr.targets)
            layer_active = True
            layer_has_t = True
        elif name in GATES_1Q:
            gates_1q += len(instr.targets)
            layer_active = True
        elif name in ("M", "MR", "MPP"):
            meas += len(instr.targets)
            layer_active = True
        elif name == "R":
            layer_active = True
    close_layer()
    return CircuitStats(
        total_qubits=prog.num_qubits,
        total_gates=gates_1q + gates_2q,
        depth=depth,
        two_qubit_gates=gates_2q,
        measurements=meas,
        t_count=t_count,
        t_support_size=len(t_support),
        t_depth=t_depth,
    )
