"""Shot-parallel Monte Carlo engine.

Every shot owns its state, RNG stream, and measurement record; the only
shared data is the read-only program.  Per-shot seeds come from SHA-1 over
(master_seed, shot_index), and the per-shot generator is SplitMix64, so runs
are bit-identical across platforms and worker counts.  Aggregation uses
integer counters only, making the reduction order irrelevant.
"""

from __future__ import annotations

import concurrent.futures
import enum
import hashlib
import math
import struct
import time
from dataclasses import dataclass, field, replace

from .circuit import (
    CircuitProgram,
    Instruction,
    PauliProduct,
    Rec,
    GATES_1Q,
    GATES_2Q,
    NOISE_OPS,
)
from .noise import NoiseOp, sample_noise
from .pauli import PauliString
from .state import CapacityError, CorruptStateError, GenStabState

_M64 = (1 << 64) - 1
_LETTER_BITS = {"X": (1, 0), "Y": (1, 1), "Z": (0, 1)}


def derive_seed(master_seed: int, shot_index: int) -> int:
    """First 8 bytes (little-endian) of SHA-1(master || shot), both encoded
    as 8 little-endian bytes."""
    digest = hashlib.sha1(
        struct.pack("<QQ", master_seed & _M64, shot_index & _M64)).digest()
    return struct.unpack("<Q", digest[:8])[0]


class ShotRng:
    """SplitMix64; pinned so results are reproducible across languages."""

    __slots__ = ("_s",)

    def __init__(self, seed: int):
        self._s = seed & _M64

    def next_u64(self) -> int:
        self._s = (self._s + 0x9E3779B97F4A7C15) & _M64
        z = self._s
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (2.0 ** -53)


class ShotStatus(enum.Enum):
    RUNNING = "running"
    PRESERVED = "preserved"
    DISCARDED = "discarded"
    OVERFLOW = "overflow"


@dataclass
class ShotResult:
    status: ShotStatus
    observables: dict[int, int] = field(default_factory=dict)
    discarded_detector: int | None = None
    overflow_instruction: int | None = None
    record: list[int] | None = None


@dataclass
class SamplerConfig:
    shots: int
    master_seed: int = 0
    batch_size: int = 1024
    entry_capacity: int = 4096
    threads: int = 1
    postselect: bool = False
    rerun_on_overflow: bool = True
    max_capacity_doublings: int = 3

    def __post_init__(self):
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.entry_capacity < 2:
            raise ValueError("entry_capacity must be >= 2")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class RunStats:
    total_shots: int
    preserved_shots: int
    discarded_shots: int
    overflow_count: int
    logical_errors: dict[int, int]
    logical_error_shots: int
    wall_time_s: float
    bayes_factor: float = 1000.0

    @property
    def discard_rate(self) -> float:
        return self.discarded_shots / self.total_shots if self.total_shots else 0.0

    @property
    def logical_error_rate(self) -> float:
        return (self.logical_error_shots / self.preserved_shots
                if self.preserved_shots else 0.0)

    @property
    def bayes_interval(self) -> tuple[float, float]:
        if self.preserved_shots == 0:
            return (0.0, 1.0)
        return bayes_interval(self.logical_error_shots, self.preserved_shots,
                              self.bayes_factor)

    @property
    def throughput(self) -> float:
        return self.total_shots / self.wall_time_s if self.wall_time_s > 0 else 0.0

    def as_dict(self) -> dict:
        lo, hi = self.bayes_interval
        return {
            "total_shots": self.total_shots,
            "preserved_shots": self.preserved_shots,
            "discarded_shots": self.discarded_shots,
            "overflow_count": self.overflow_count,
            "discard_rate": self.discard_rate,
            "logical_errors": {str(k): v for k, v in
                               sorted(self.logical_errors.items())},
            "logical_error_shots": self.logical_error_shots,
            "logical_error_rate": self.logical_error_rate,
            "bayes_lo": lo,
            "bayes_hi": hi,
            "wall_time_s": self.wall_time_s,
            "throughput": self.throughput,
        }


class ShotContext:
    """Preallocated per-shot workspace, reused across a wave of shots."""

    def __init__(self, num_qubits: int, entry_capacity: int):
        self.num_qubits = num_qubits
        self.entry_capacity = entry_capacity
        self.state: GenStabState | None = None
        self.rng: ShotRng | None = None
        self.record: list[int] = []

    def reset(self, seed: int, capacity: int | None = None) -> None:
        cap = capacity if capacity is not None else self.entry_capacity
        self.state = GenStabState(self.num_qubits, capacity=cap)
        self.rng = ShotRng(seed)
        self.record = []


def run_shot(prog: CircuitProgram, ctx: ShotContext, *,
             postselect: bool = False, observer=None,
             keep_record: bool = False) -> ShotResult:
    """Execute one trajectory on a freshly reset context."""
    state = ctx.state
    rng = ctx.rng
    record = ctx.record
    n = prog.num_qubits
    observables: dict[int, int] = {}
    detector_index = -1

    for i, instr in enumerate(prog.flat()):
        name = instr.name
        try:
            if name == "TICK" or name == "QUBIT_COORDS" or name == "SHIFT_COORDS":
                pass
            elif name in NOISE_OPS:
                err = sample_noise(NoiseOp.from_instruction(instr), n,
                                   rng.uniform)
                if observer is not None:
                    observer.on_random_pauli(i, err)
                if not err.is_identity:
                    state.apply_pauli(err)
            elif name in ("T", "T_DAG"):
                for q in instr.targets:
                    state.apply_t(q, dagger=name == "T_DAG")
            elif name in GATES_2Q:
                it = iter(instr.targets)
                for a, b in zip(it, it):
                    if isinstance(a, Rec):
                        if record[a.offset]:
                            fb = "X" if name == "CX" else "Z"
                            state.apply_clifford(fb, (b,))
                    else:
                        state.apply_clifford(name, (a, b))
            elif name in ("X", "Z") and any(isinstance(t, Rec)
                                            for t in instr.targets):
                it = iter(instr.targets)
                for rec, q in zip(it, it):
                    if record[rec.offset]:
                        state.apply_clifford(name, (q,))
            elif name in GATES_1Q:
                for q in instr.targets:
                    state.apply_clifford(name, (q,))
            elif name in ("M", "MR", "R"):
                for q in instr.targets:
                    p = PauliString(n, 0, 1 << q, 0)
                    outcome = _measure(state, p, rng, observer, i)
                    bit = 0 if outcome == 1 else 1
                    if name != "R":
                        record.append(bit)
                    if name != "M" and bit:
                        state.apply_clifford("X", (q,))
            elif name == "MPP":
                flip_p = instr.args[0] if instr.args else 0.0
                for prod in instr.targets:
                    p = _product_pauli(prod, n)
                    outcome = _measure(state, p, rng, observer, i)
                    bit = 0 if outcome == 1 else 1
                    if flip_p > 0.0 and rng.uniform() < flip_p:
                        bit ^= 1
                    record.append(bit)
            elif name == "DETECTOR":
                detector_index += 1
                parity = 0
                for t in instr.targets:
                    parity ^= record[t.offset]
                if postselect and parity:
                    return ShotResult(status=ShotStatus.DISCARDED,
                                      discarded_detector=detector_index,
                                      record=list(record) if keep_record else None)
            elif name == "OBSERVABLE_INCLUDE":
                key = int(instr.args[0]) if instr.args else 0
                parity = 0
                for t in instr.targets:
                    parity ^= record[t.offset]
                observables[key] = observables.get(key, 0) ^ parity
            else:
                raise ValueError(f"unexecutable instruction {name}")
        except CapacityError:
            return ShotResult(status=ShotStatus.OVERFLOW,
                              overflow_instruction=i,
                              record=list(record) if keep_record else None)
        if observer is not None:
            observer.after_instruction(i, instr, state)
    return ShotResult(status=ShotStatus.PRESERVED, observables=observables,
                      record=list(record) if keep_record else None)


def _measure(state: GenStabState, p: PauliString, rng: ShotRng,
             observer, instr_index: int) -> int:
    if observer is not None:
        prob_plus = state.branch_probability_plus(p)
    u = rng.uniform()
    outcome = state.measure_pauli(p, u)
    if observer is not None:
        observer.on_measurement(instr_index, p, outcome, prob_plus)
    return outcome


def _product_pauli(prod: PauliProduct, n: int) -> PauliString:
    x = 0
    z = 0
    for q, letter in prod.terms:
        bx, bz = _LETTER_BITS[letter]
        x |= bx << q
        z |= bz << q
    return PauliString(n, x, z, 0)


# ----------------------------------------------------------------------
# Batched execution
# ----------------------------------------------------------------------

@dataclass
class _ChunkCounters:
    total: int = 0
    preserved: int = 0
    discarded: int = 0
    overflow: int = 0
    error_shots: int = 0
    per_observable: dict[int, int] = field(default_factory=dict)

    def merge(self, other: "_ChunkCounters") -> None:
        self.total += other.total
        self.preserved += other.preserved
        self.discarded += other.discarded
        self.overflow += other.overflow
        self.error_shots += other.error_shots
        for k, v in other.per_observable.items():
            self.per_observable[k] = self.per_observable.get(k, 0) + v


def _run_chunk(prog: CircuitProgram, cfg: SamplerConfig, start: int,
               stop: int) -> _ChunkCounters:
    ctx = ShotContext(prog.num_qubits, cfg.entry_capacity)
    out = _ChunkCounters()
    for shot in range(start, stop):
        seed = derive_seed(cfg.master_seed, shot)
        capacity = cfg.entry_capacity
        attempts = cfg.max_capacity_doublings if cfg.rerun_on_overflow else 0
        while True:
            ctx.reset(seed, capacity=capacity)
            res = run_shot(prog, ctx, postselect=cfg.postselect)
            if res.status is not ShotStatus.OVERFLOW or attempts == 0:
                break
            attempts -= 1
            capacity *= 2
        out.total += 1
        if res.status is ShotStatus.PRESERVED:
            out.preserved += 1
            bad = False
            for k, v in res.observables.items():
                if v:
                    out.per_observable[k] = out.per_observable.get(k, 0) + 1
                    bad = True
            if bad:
                out.error_shots += 1
        elif res.status is ShotStatus.DISCARDED:
            out.discarded += 1
        else:
            out.overflow += 1
    return out


_WORKER_PROG: CircuitProgram | None = None
_WORKER_CFG: SamplerConfig | None = None


def _worker_init(prog: CircuitProgram, cfg: SamplerConfig) -> None:
    global _WORKER_PROG, _WORKER_CFG
    _WORKER_PROG = prog
    _WORKER_CFG = cfg


def _worker_chunk(bounds: tuple[int, int]) -> _ChunkCounters:
    return _run_chunk(_WORKER_PROG, _WORKER_CFG, bounds[0], bounds[1])


def run_batch(prog: CircuitProgram, cfg: SamplerConfig) -> RunStats:
    """Run cfg.shots independent shots, issued in waves of batch_size.

    Results are a pure function of (program, config): worker count and
    scheduling never change the counters.
    """
    t0 = time.perf_counter()
    agg = _ChunkCounters()
    if cfg.shots > 0:
        if cfg.threads == 1:
            for lo in range(0, cfg.shots, cfg.batch_size):
                hi = min(lo + cfg.batch_size, cfg.shots)
                agg.merge(_run_chunk(prog, cfg, lo, hi))
        else:
            with concurrent.futures.ProcessPoolExecutor(
                    max_workers=cfg.threads,
                    initializer=_worker_init,
                    initargs=(prog, cfg)) as pool:
                for lo in range(0, cfg.shots, cfg.batch_size):
                    hi = min(lo + cfg.batch_size, cfg.shots)
                    step = max(1, math.ceil((hi - lo) / cfg.threads))
                    bounds = [(a, min(a + step, hi))
                              for a in range(lo, hi, step)]
                    for part in pool.map(_worker_chunk, bounds):
                        agg.merge(part)
    wall = time.perf_counter() - t0
    return RunStats(
        total_shots=agg.total,
        preserved_shots=agg.preserved,
        discarded_shots=agg.discarded,
        overflow_count=agg.overflow,
        logical_errors=dict(sorted(agg.per_observable.items())),
        logical_error_shots=agg.error_shots,
        wall_time_s=wall,
    )


# ----------------------------------------------------------------------
# Statistics
# ----------------------------------------------------------------------

def bayes_interval(k: int, n: int, factor: float = 1000.0) -> tuple[float, float]:
    """Likelihood-ratio interval: all rates p whose binomial likelihood is
    within ``factor`` of the maximum-likelihood value."""
    if n < 1:
        raise ValueError("need at least one trial")
    if not 0 <= k <= n:
        raise ValueError("k out of range")
    if k == 0:
        return 0.0, 1.0 - factor ** (-1.0 / n)
    if k == n:
        return factor ** (-1.0 / n), 1.0
    phat = k / n

    def excess(p: float) -> float:
        ll = k * math.log(p) + (n - k) * math.log1p(-p)
        llmax = k * math.log(phat) + (n - k) * math.log1p(-phat)
        return ll - llmax + math.log(factor)

    lo = _bisect_root(excess, 0.0, phat, increasing=True)
    hi = _bisect_root(excess, phat, 1.0, increasing=False)
    return lo, hi


def _bisect_root(f, a: float, b: float, *, increasing: bool,
                 rtol: float = 1e-6) -> float:
    # f < 0 on the far side of the bracket, f > 0 at the MLE end.
    lo, hi = a, b
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        val = f(mid) if mid not in (0.0, 1.0) else -1.0
        inside = val >= 0.0
        if inside == increasing:
            hi = mid
        else:
            lo = mid
        ref = max(abs(lo), abs(hi), 1e-300)
        if (hi - lo) <= rtol * ref:
            break
    return 0.5 * (lo + hi)


# ----------------------------------------------------------------------
# Benchmarks
# ----------------------------------------------------------------------

def throughput_bench(prog: CircuitProgram, cfg: SamplerConfig, sweep: str,
                     values) -> list[tuple[float, float, float]]:
    """Sweep batch size or noise strength; rows are
    (swept value, shots/s, discard rate)."""
    from .noise import apply_noise_model

    rows: list[tuple[float, float, float]] = []
    for value in values:
        if sweep == "batch-size":
            stats = run_batch(prog, replace(cfg, batch_size=int(value)))
        elif sweep == "noise":
            noisy = apply_noise_model(prog, float(value))
            stats = run_batch(noisy, cfg)
        else:
            raise ValueError(f"unknown sweep kind {sweep!r}")
        rows.append((float(value), stats.throughput, stats.discard_rate))
    return rows
