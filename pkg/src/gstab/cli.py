"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 parse error.
JSON goes to stdout by default; --out redirects it to a file.  The
SOFT_THREADS environment variable supplies the default for --threads.
"""

from __future__ import annotations

import json
import os
import random
import sys

import click

from .backend import name as backend_name
from .circuit import ParseError, compute_stats, parse_circuit
from .fuzz import generate_program, generate_suite
from .noise import NoiseModelError, apply_noise_model
from .oracle import DENSE_MAX_QUBITS, CrosscheckReport, crosscheck
from .sampler import SamplerConfig, run_batch, throughput_bench

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_PARSE = 3


def _default_threads() -> int:
    return int(os.environ.get("SOFT_THREADS", "1"))


def _load_circuit(path: str):
    try:
        with open(path) as fh:
            return parse_circuit(fh.read())
    except ParseError as exc:
        click.echo(f"parse error in {path}: {exc}", err=True)
        sys.exit(EXIT_PARSE)


def _emit(payload: str, out: str | None) -> None:
    if out:
        with open(out, "w") as fh:
            fh.write(payload)
    else:
        click.echo(payload)


@click.group()
@click.version_option(package_name="gstab")
def main():
    """Monte Carlo sampler for noisy Clifford+T circuits."""


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.option("--shots", type=int, required=True, help="Number of shots.")
@click.option("--seed", type=int, default=0, show_default=True,
              help="Master seed; per-shot seeds are derived from it.")
@click.option("--threads", type=int, default=None,
              help="Worker processes [default: SOFT_THREADS or 1].")
@click.option("--batch-size", type=int, default=1024, show_default=True)
@click.option("--noise", "noise_p", type=float, default=None,
              help="Insert uniform depolarizing noise of this strength; "
                   "the circuit must be noiseless.")
@click.option("--postselect/--no-postselect", default=False,
              help="Discard shots on the first firing detector.")
@click.option("--entry-capacity", type=int, default=4096, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the JSON results here instead of stdout.")
def sample(circuit, shots, seed, threads, batch_size, noise_p, postselect,
           entry_capacity, out):
    """Run shots of CIRCUIT and report aggregate statistics."""
    prog = _load_circuit(circuit)
    if noise_p is not None:
        try:
            prog = apply_noise_model(prog, noise_p)
        except NoiseModelError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
    cfg = SamplerConfig(shots=shots, master_seed=seed,
                        batch_size=batch_size, entry_capacity=entry_capacity,
                        threads=threads if threads is not None
                        else _default_threads(),
                        postselect=postselect)
    stats = run_batch(prog, cfg)
    d = stats.as_dict()
    _emit(json.dumps(d, indent=2) + "\n", out)
    click.echo(
        f"shots={d['total_shots']} preserved={d['preserved_shots']} "
        f"discard_rate={d['discard_rate']:.4f} "
        f"errors={d['logical_error_shots']} "
        f"ler={d['logical_error_rate']:.3e} "
        f"interval=[{d['bayes_lo']:.3e}, {d['bayes_hi']:.3e}] "
        f"overflow={d['overflow_count']} "
        f"throughput={d['throughput']:.0f}/s backend={backend_name()}",
        err=True)


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def stats(circuit, out):
    """Print circuit statistics (qubits, gates, depth, T counts)."""
    prog = _load_circuit(circuit)
    d = compute_stats(prog).as_dict()
    width = max(len(k) for k in d)
    for k, v in d.items():
        click.echo(f"{k:<{width}}  {v}", err=True)
    _emit(json.dumps(d, indent=2) + "\n", out)


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False),
                required=False)
@click.option("--random-suite", type=int, default=None,
              help="Validate this many generated random circuits instead "
                   "of a file.")
@click.option("--shots", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def validate(circuit, random_suite, shots, seed, out):
    """Cross-validate trajectories against the dense reference engine."""
    if (circuit is None) == (random_suite is None):
        click.echo("error: give either CIRCUIT or --random-suite", err=True)
        sys.exit(EXIT_USAGE)
    if circuit is not None:
        progs = [_load_circuit(circuit)]
    else:
        progs = generate_suite(seed, random_suite)
    report = None
    for i, prog in enumerate(progs):
        if prog.num_qubits > DENSE_MAX_QUBITS:
            click.echo(f"error: circuit has {prog.num_qubits} qubits; "
                       f"validation requires <= {DENSE_MAX_QUBITS}", err=True)
            sys.exit(EXIT_USAGE)
        part = crosscheck(prog, shots, seed=seed + 1000 * (i + 1))
        report = part if report is None else report.merge(part)
    _emit(json.dumps(report.as_dict(), indent=2) + "\n", out)
    if not report.ok:
        click.echo(f"validation FAILED: max_infidelity="
                   f"{report.max_infidelity:.3e}, "
                   f"{len(report.failures)} hard failures", err=True)
        sys.exit(EXIT_VALIDATION)
    click.echo(f"validation passed: circuits={report.circuits} "
               f"shots/circuit={shots} "
               f"max_infidelity={report.max_infidelity:.3e} "
               f"max_prob_delta={report.max_prob_delta:.3e}", err=True)


@main.command()
@click.argument("circuit", type=click.Path(exists=True, dir_okay=False))
@click.option("--sweep", type=click.Choice(["batch-size", "noise"]),
              required=True)
@click.option("--values", required=True,
              help="Comma-separated swept values, e.g. 1,64,4096.")
@click.option("--shots", type=int, default=10000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--threads", type=int, default=None)
@click.option("--postselect/--no-postselect", default=False)
@click.option("--entry-capacity", type=int, default=4096, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bench(circuit, sweep, values, shots, seed, threads, postselect,
          entry_capacity, out):
    """Sweep batch size or noise strength; emit CSV of throughput."""
    prog = _load_circuit(circuit)
    try:
        parsed = [float(v) for v in values.split(",") if v.strip()]
    except ValueError:
        click.echo(f"error: malformed --values {values!r}", err=True)
        sys.exit(EXIT_USAGE)
    lines = ["value,shots_per_s,discard_rate"]
    if shots > 0:
        cfg = SamplerConfig(shots=shots, master_seed=seed,
                            entry_capacity=entry_capacity,
                            threads=threads if threads is not None
                            else _default_threads(),
                            postselect=postselect)
        try:
            rows = throughput_bench(prog, cfg, sweep, parsed)
        except NoiseModelError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        for value, tput, dr in rows:
            lines.append(f"{value:g},{tput:.2f},{dr:.6f}")
    _emit("\n".join(lines) + "\n", out)


@main.command()
@click.option("--count", type=int, default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out-dir", type=click.Path(file_okay=False), default=None,
              help="Write one .stim file per program instead of stdout.")
def fuzz(count, seed, out_dir):
    """Generate random Clifford+T test programs."""
    rng = random.Random(seed)
    for i in range(count):
        prog = generate_program(rng)
        text = prog.serialize()
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
            with open(os.path.join(out_dir, f"fuzz_{seed}_{i:04d}.stim"),
                      "w") as fh:
                fh.write(text)
        else:
            click.echo(f"# program {i}")
            click.echo(text)
    if out_dir:
        click.echo(f"wrote {count} programs to {out_dir}", err=True)


if __name__ == "__main__":
    main()
