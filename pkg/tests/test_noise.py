"""Noise channel sampling and the uniform depolarizing transformer."""

import random

import pytest

from gstab.circuit import parse_circuit
from gstab.noise import (
    NoiseModelError,
    NoiseOp,
    apply_noise_model,
    sample_noise,
)


class CountingRand:
    def __init__(self, seed=0):
        self.rng = random.Random(seed)
        self.calls = 0

    def __call__(self):
        self.calls += 1
        return self.rng.random()


def test_noise_op_validation():
    NoiseOp("X_ERROR", (0,), 0.5)
    with pytest.raises(NoiseModelError):
        NoiseOp("BAD", (0,), 0.5)
    with pytest.raises(NoiseModelError):
        NoiseOp("X_ERROR", (0,), 1.5)
    with pytest.raises(NoiseModelError):
        NoiseOp("DEPOLARIZE2", (0, 1, 2), 0.1)
    with pytest.raises(NoiseModelError):
        NoiseOp("X_ERROR", (), 0.1)


@pytest.mark.parametrize("kind,targets,draws", [
    ("DEPOLARIZE1", (0, 1, 2), 6),
    ("DEPOLARIZE2", (0, 1, 2, 3), 4),
    ("X_ERROR", (0, 1), 2),
    ("Z_ERROR", (4,), 1),
])
def test_fixed_draw_counts(kind, targets, draws):
    # draw counts must not depend on whether errors fire
    for p in (0.0, 0.5, 1.0):
        rand = CountingRand()
        sample_noise(NoiseOp(kind, targets, p), 5, rand)
        assert rand.calls == draws, (kind, p)


def test_error_channels_at_extremes():
    rand = CountingRand()
    e = sample_noise(NoiseOp("X_ERROR", (0, 2), 1.0), 3, rand)
    assert e.x_bits == 0b101 and e.z_bits == 0
    e = sample_noise(NoiseOp("Z_ERROR", (1,), 1.0), 3, rand)
    assert e.z_bits == 0b010 and e.x_bits == 0
    e = sample_noise(NoiseOp("DEPOLARIZE1", (0,), 0.0), 3, rand)
    assert e.is_identity


def test_depolarize1_uniform_over_letters():
    rand = CountingRand(1)
    counts = {"X": 0, "Y": 0, "Z": 0}
    for _ in range(6000):
        e = sample_noise(NoiseOp("DEPOLARIZE1", (0,), 1.0), 1, rand)
        x, z = e.x_bits & 1, e.z_bits & 1
        counts[{(1, 0): "X", (1, 1): "Y", (0, 1): "Z"}[(x, z)]] += 1
    for v in counts.values():
        assert 1800 < v < 2200


def test_depolarize2_never_identity_and_covers_15():
    rand = CountingRand(2)
    seen = set()
    for _ in range(3000):
        e = sample_noise(NoiseOp("DEPOLARIZE2", (0, 1), 1.0), 2, rand)
        assert not e.is_identity
        seen.add((e.x_bits, e.z_bits))
    assert len(seen) == 15


def test_transform_golden_layout():
    prog = parse_circuit("H 0\nTICK\nM 0\nI 1\n")
    noisy = apply_noise_model(prog, 0.01)
    assert noisy.serialize() == (
        "H 0\n"
        "DEPOLARIZE1(0.01) 0\n"
        "DEPOLARIZE1(0.01) 1\n"
        "TICK\n"
        "X_ERROR(0.01) 0\n"
        "M 0\n"
        "I 1\n"
        "DEPOLARIZE1(0.01) 1\n")


def test_transform_two_qubit_and_resets():
    prog = parse_circuit("CX 0 1\nTICK\nR 0\nMR 1\n")
    noisy = apply_noise_model(prog, 0.125)
    assert noisy.serialize() == (
        "CX 0 1\n"
        "DEPOLARIZE2(0.125) 0 1\n"
        "TICK\n"
        "R 0\n"
        "X_ERROR(0.125) 0\n"
        "X_ERROR(0.125) 1\n"
        "MR 1\n"
        "X_ERROR(0.125) 1\n")


def test_transform_feedback_stays_noiseless():
    prog = parse_circuit("M 0\nX rec[-1] 0\nM 0\n")
    noisy = apply_noise_model(prog, 0.1)
    lines = noisy.serialize().splitlines()
    i = lines.index("X rec[-1] 0")
    assert lines[i + 1] != "DEPOLARIZE1(0.1) 0"


def test_transform_inside_repeat():
    prog = parse_circuit("REPEAT 3 {\n  H 0\n}\n")
    noisy = apply_noise_model(prog, 0.25)
    flat = [str(i) for i in noisy.flat()]
    assert flat == ["H 0", "DEPOLARIZE1(0.25) 0"] * 3


def test_transform_p_zero_is_identity():
    prog = parse_circuit("H 0\nM 0\n")
    assert apply_noise_model(prog, 0.0) is prog


def test_transform_rejects_noisy_input():
    prog = parse_circuit("X_ERROR(0.1) 0\nM 0\n")
    with pytest.raises(NoiseModelError):
        apply_noise_model(prog, 0.01)
    with pytest.raises(NoiseModelError):
        apply_noise_model(parse_circuit("M 0\n"), 1.5)
