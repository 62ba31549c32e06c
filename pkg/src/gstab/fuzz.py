"""Random Clifford+T program generation for differential testing.

Programs are emitted as circuit text and re-parsed, so everything the
generator produces is by construction valid input for the parser and both
engines.  Sizes default to the cross-validation envelope: n <= 10 qubits,
<= 40 gates, <= 8 T gates, mid-circuit M/MR, optional noise and feedback.
"""

from __future__ import annotations

import random

from .circuit import CircuitProgram, parse_circuit

_CLIFFORD_1Q = ("I", "X", "Y", "Z", "H", "S", "S_DAG", "H_XY", "H_NXY")
_CLIFFORD_2Q = ("CX", "CZ", "SWAP")


def generate_program(rng: random.Random, *, max_qubits: int = 10,
                     max_gates: int = 40, max_t: int = 8,
                     noise_p: float = 0.05, allow_noise: bool = True,
                     allow_feedback: bool = True) -> CircuitProgram:
    """One random program; deterministic given the Random instance state."""
    n = rng.randint(2, max_qubits)
    num_ops = rng.randint(5, max_gates)
    t_budget = rng.randint(0, max_t)
    lines: list[str] = []
    measurements = 0

    # Spread some entanglement first so measurements are not all trivial.
    lines.append(f"H {rng.randrange(n)}")
    if n >= 2:
        a, b = rng.sample(range(n), 2)
        lines.append(f"CX {a} {b}")

    for _ in range(num_ops):
        roll = rng.random()
        if roll < 0.10 and t_budget > 0:
            t_budget -= 1
            gate = rng.choice(("T", "T_DAG"))
            lines.append(f"{gate} {rng.randrange(n)}")
        elif roll < 0.40:
            lines.append(f"{rng.choice(_CLIFFORD_1Q)} {rng.randrange(n)}")
        elif roll < 0.65 and n >= 2:
            a, b = rng.sample(range(n), 2)
            lines.append(f"{rng.choice(_CLIFFORD_2Q)} {a} {b}")
        elif roll < 0.75:
            op = rng.choice(("M", "MR"))
            lines.append(f"{op} {rng.randrange(n)}")
            measurements += 1
        elif roll < 0.80:
            lines.append(f"R {rng.randrange(n)}")
        elif roll < 0.88 and allow_noise:
            kind = rng.choice(("X_ERROR", "Z_ERROR", "DEPOLARIZE1",
                               "DEPOLARIZE2"))
            if kind == "DEPOLARIZE2" and n >= 2:
                a, b = rng.sample(range(n), 2)
                lines.append(f"DEPOLARIZE2({noise_p}) {a} {b}")
            else:
                if kind == "DEPOLARIZE2":
                    kind = "DEPOLARIZE1"
                lines.append(f"{kind}({noise_p}) {rng.randrange(n)}")
        elif roll < 0.93 and allow_feedback and measurements > 0:
            gate = rng.choice(("X", "Z", "CX", "CZ"))
            k = rng.randint(1, measurements)
            lines.append(f"{gate} rec[-{k}] {rng.randrange(n)}")
        elif roll < 0.96 and measurements > 0:
            k = rng.randint(1, measurements)
            lines.append(f"DETECTOR rec[-{k}]")
        else:
            lines.append("TICK")

    lines.append(f"M {rng.randrange(n)}")
    measurements += 1
    if measurements >= 2 and rng.random() < 0.5:
        lines.append("OBSERVABLE_INCLUDE(0) rec[-1] rec[-2]")
    else:
        lines.append("OBSERVABLE_INCLUDE(0) rec[-1]")
    return parse_circuit("\n".join(lines) + "\n")


def generate_suite(seed: int, count: int, **kwargs) -> list[CircuitProgram]:
    rng = random.Random(seed)
    return [generate_program(rng, **kwargs) for _ in range(count)]
