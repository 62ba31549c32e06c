"""Compare the compiled kernel backend against the pure-Python fallback.

Runs the same sampling workload under each available backend and prints
shots per second.  Usage:

    python3 benchmarks/bench_backends.py [--shots N] [--qubits N] [--seed S]
"""

import argparse
import random
import time

from gstab import backend
from gstab.fuzz import generate_program
from gstab.sampler import SamplerConfig, run_batch


def make_workload(qubits: int, seed: int):
    rng = random.Random(seed)
    return generate_program(rng, max_qubits=qubits, max_gates=80, max_t=12,
                            noise_p=0.01)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--shots", type=int, default=2000)
    ap.add_argument("--qubits", type=int, default=10)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    prog = make_workload(args.qubits, args.seed)
    cfg = SamplerConfig(shots=args.shots, master_seed=args.seed)
    print(f"workload: {prog.num_qubits} qubits, "
          f"{sum(1 for _ in prog.flat())} instructions, {args.shots} shots")

    results = {}
    for which in backend.available():
        backend.use(which)
        run_batch(prog, SamplerConfig(shots=100, master_seed=args.seed))  # warm up
        t0 = time.perf_counter()
        stats = run_batch(prog, cfg)
        dt = time.perf_counter() - t0
        results[which] = (args.shots / dt, stats)
        print(f"{which:>9}: {args.shots / dt:10.1f} shots/s "
              f"(discard_rate={stats.discard_rate:.3f})")

    if len(results) == 2:
        py, _ = results["python"]
        cc, _ = results["compiled"]
        print(f"  speedup: {cc / py:.2f}x")
        a = results["python"][1]
        b = results["compiled"][1]
        same = (a.preserved_shots == b.preserved_shots
                and a.logical_error_shots == b.logical_error_shots
                and a.discarded_shots == b.discarded_shots)
        print(f"  identical counters: {same}")


if __name__ == "__main__":
    main()
