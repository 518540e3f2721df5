"""Command line front end.

Result tables go to stdout (or --out) as CSV and are byte-identical for a
fixed config and seed; progress and timing go to stderr. Exit codes: 0 on
success, 1 when a verification check fails, 2 for an invalid configuration,
3 when the request is outside the protocol's domain (for example a flip on
the control mode).
"""

from __future__ import annotations

import sys
import time

import click

from .errors import ConfigError, UnsupportedInputError
from .harness import (
    ExperimentConfig,
    render_csv,
    resolve_config,
    run_correct,
    run_purify,
    run_sweep,
    write_results,
)
from .verify import run_verify

ERROR_CHOICES = (
    "logic-bit",
    "logic-phase",
    "phys-bit",
    "phys-phase",
    "logic-bitflip",
    "logic-phaseflip",
    "phys-bitflip",
    "phys-phaseflip",
)


def _common_options(fn):
    fn = click.option("--config", "config_path", default=None, metavar="FILE",
                      help="Flat key=value config file; explicit flags win.")(fn)
    fn = click.option("--out", default=None, metavar="FILE",
                      help="Write CSV here (plus a .json config sidecar) instead of stdout.")(fn)
    fn = click.option("--seed", type=int, default=None, help="Sampling seed.")(fn)
    fn = click.option("--n", "n", type=int, default=None,
                      help="Physical qubits per logic qubit (>= 2).")(fn)
    return fn


def _finish(cfg: ExperimentConfig, rows, started: float) -> None:
    csv_text = render_csv(rows)
    if cfg.out:
        write_results(rows, cfg.out, cfg.as_dict())
        click.echo(f"wrote {len(rows)} rows to {cfg.out}", err=True)
    else:
        click.echo(csv_text, nl=False)
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    click.echo(f"done in {elapsed_ms:.1f} ms", err=True)


def _run(mode: str, config_path: str | None, flag_values: dict) -> None:
    started = time.perf_counter()
    try:
        cfg = resolve_config(mode, flag_values, config_path)
        if mode == "purify":
            rows = run_purify(cfg)
        elif mode == "sweep":
            rows = run_sweep(cfg)
        else:
            rows = run_correct(cfg)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except UnsupportedInputError as exc:
        click.echo(f"unsupported input: {exc}", err=True)
        sys.exit(3)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    _finish(cfg, rows, started)


@click.group()
@click.version_option(package_name="ghzpurify")
def main() -> None:
    """Exact simulator and experiment harness for purifying logic Bell pairs
    built from concatenated GHZ blocks."""


@main.command()
@click.option("--error", type=click.Choice(ERROR_CHOICES), default=None,
              help="Error kind mixed into the input pair (default logic-bit).")
@click.option("--fidelity", type=float, default=None,
              help="Input fidelity of each noisy pair.")
@click.option("--rounds", type=int, default=None, help="Purification rounds.")
@click.option("--shots", type=int, default=None,
              help="Monte Carlo shots per round; 0 (default) runs exactly.")
@click.option("--flip-position", type=int, default=None, metavar="K",
              help="1-based mode the physical error sits on (phys kinds).")
@_common_options
def purify(n, seed, out, config_path, error, fidelity, rounds, shots,
           flip_position) -> None:
    """Purify a noisy logic Bell pair at one input fidelity."""
    _run("purify", config_path, {
        "n": n, "seed": seed, "out": out, "error": error,
        "fidelity": fidelity, "rounds": rounds, "shots": shots,
        "flip-position": flip_position,
    })


@main.command()
@click.option("--error", type=click.Choice(ERROR_CHOICES), default=None,
              help="Error kind mixed into the input pair (default logic-bit).")
@click.option("--f-min", type=float, default=None, help="Grid start fidelity.")
@click.option("--f-max", type=float, default=None, help="Grid end fidelity.")
@click.option("--steps", type=int, default=None, help="Number of grid points.")
@click.option("--rounds", type=int, default=None, help="Purification rounds.")
@click.option("--shots", type=int, default=None,
              help="Monte Carlo shots per round; 0 (default) runs exactly.")
@click.option("--flip-position", type=int, default=None, metavar="K",
              help="1-based mode the physical error sits on (phys kinds).")
@_common_options
def sweep(n, seed, out, config_path, error, f_min, f_max, steps, rounds,
          shots, flip_position) -> None:
    """Sweep input fidelity over a uniform grid."""
    _run("sweep", config_path, {
        "n": n, "seed": seed, "out": out, "error": error,
        "f-min": f_min, "f-max": f_max, "steps": steps, "rounds": rounds,
        "shots": shots, "flip-position": flip_position,
    })


@main.command()
@click.option("--flip-position", type=int, default=None, metavar="K",
              help="1-based mode of logic qubit A carrying the bit flip.")
@click.option("--fidelity", type=float, default=None,
              help="Optional mixture weight of the clean pair (default 0).")
@_common_options
def correct(n, seed, out, config_path, flip_position, fidelity) -> None:
    """Correct a single physical bit flip inside one logic qubit."""
    _run("correct", config_path, {
        "n": n, "seed": seed, "out": out, "error": "phys-bit",
        "flip-position": flip_position, "fidelity": fidelity,
    })


@main.command()
@click.option("--n", "max_n", type=int, default=3,
              help="Largest logic-qubit size to check (from 2).")
@click.option("--oracle", is_flag=True, default=False,
              help="Also cross-check against the dense density-matrix engine.")
def verify(max_n: int, oracle: bool) -> None:
    """Run the internal invariant checks and report PASS/FAIL per check."""
    started = time.perf_counter()
    try:
        results = run_verify(max_n=max_n, oracle=oracle)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    for result in results:
        click.echo(result.line())
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    failed = [r for r in results if not r.passed]
    click.echo(
        f"{len(results) - len(failed)}/{len(results)} checks passed"
        f" in {elapsed_ms:.1f} ms",
        err=True,
    )
    if failed:
        sys.exit(1)


if __name__ == "__main__":
    main()
