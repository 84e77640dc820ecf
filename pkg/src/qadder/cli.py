"""Command-line interface: simulate, table1, sweep, tomography.

Exit codes: 0 success, 1 configuration error (bad flags, bad document,
unparseable states), 2 runtime error (every pair failed, or a reconstruction
did not converge).
"""

import argparse
import dataclasses
import json
import sys

import numpy as np

from .__about__ import __version__
from .experiment import (
    ExperimentSpec,
    builtin_table1,
    emit,
    parse_spec,
    run_experiment,
    sweep,
)
from .noise import NoiseModel, RandomSource
from .protocol import Qubit, ZeroSuccessError
from .tomography import (
    CountsRecord,
    ReconstructionError,
    ReconstructionResult,
    bootstrap_errors,
    linear_inversion,
    mle_reconstruct,
)

_STATE_HELP = "state as 'a_re,a_im,b_re,b_im' or 'a,b' for real amplitudes"


def _parse_cli_state(text: str) -> Qubit:
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 2:
        return Qubit.from_amplitudes(parts[0], parts[1])
    if len(parts) == 4:
        return Qubit.from_amplitudes(complex(parts[0], parts[1]), complex(parts[2], parts[3]))
    raise ValueError(f"state needs 2 or 4 comma-separated numbers, got {text!r}")


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--seed", type=int, default=None, help="base RNG seed")
    parser.add_argument("--shots", type=int, default=None, help="total counts per pair")
    parser.add_argument("--theta", type=float, default=None, help="erasure angle in degrees")
    parser.add_argument(
        "--visibility", type=float, default=None, help="control-state visibility in [0, 1]"
    )
    parser.add_argument(
        "--visibility-mode",
        choices=("control", "product"),
        default=None,
        help="use the control visibility alone or the product of all three",
    )
    parser.add_argument(
        "--mode", choices=("ideal", "noisy", "tomographic"), default=None
    )
    parser.add_argument("--trials", type=int, default=None, help="trials per pair")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--out", default="-", help="output path, or - for stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qadder",
        description="Heralded superposition of polarization qubits: simulation harness.",
    )
    parser.add_argument("--version", action="version", version=f"qadder {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one input pair (or a config document)")
    p_sim.add_argument("--input1", help=_STATE_HELP)
    p_sim.add_argument("--input2", help=_STATE_HELP)
    p_sim.add_argument("--config", help="experiment document (JSON file)")
    p_sim.add_argument(
        "--lax", action="store_true", help="warn instead of failing on unknown config fields"
    )
    _add_common(p_sim)

    p_tab = sub.add_parser("table1", help="run the built-in 11-pair benchmark")
    _add_common(p_tab)

    p_swp = sub.add_parser("sweep", help="sweep theta, phase or visibility over a grid")
    p_swp.add_argument(
        "--parameter", required=True, choices=("theta", "phase", "visibility")
    )
    p_swp.add_argument(
        "--grid",
        required=True,
        help="comma-separated grid (theta: degrees, phase: units of pi, visibility: [0,1])",
    )
    p_swp.add_argument("--input1", help=_STATE_HELP)
    p_swp.add_argument("--input2", help=_STATE_HELP)
    p_swp.add_argument("--config", help="experiment document (JSON file)")
    p_swp.add_argument("--lax", action="store_true")
    _add_common(p_swp)

    p_tom = sub.add_parser(
        "tomography", help="reconstruct a state from a counts record (JSON file)"
    )
    p_tom.add_argument("--counts", required=True, help="counts record file")
    p_tom.add_argument("--target", help=f"pure target for metrics; {_STATE_HELP}")
    p_tom.add_argument("--resamples", type=int, default=100, help="bootstrap resamples")
    p_tom.add_argument("--seed", type=int, default=12345)
    p_tom.add_argument("--out", default="-")
    return parser


def _apply_overrides(spec: ExperimentSpec, args) -> ExperimentSpec:
    changes = {}
    if args.theta is not None:
        changes["theta_degrees"] = args.theta
    if args.shots is not None:
        changes["shots"] = args.shots
    if args.seed is not None:
        changes["seeds"] = (args.seed,)
    if args.trials is not None:
        changes["trials_per_pair"] = args.trials
    if args.mode is not None:
        changes["mode"] = args.mode
    noise_changes = {}
    if args.visibility is not None:
        noise_changes["control_visibility"] = args.visibility
    if args.visibility_mode is not None:
        noise_changes["visibility_mode"] = args.visibility_mode
    if noise_changes:
        changes["noise"] = dataclasses.replace(spec.noise, **noise_changes)
    return dataclasses.replace(spec, **changes) if changes else spec


def _spec_from_args(args, default: ExperimentSpec | None = None) -> ExperimentSpec:
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            spec = parse_spec(fh.read(), strict=not getattr(args, "lax", False))
    elif getattr(args, "input1", None) and getattr(args, "input2", None):
        q1 = _parse_cli_state(args.input1)
        q2 = _parse_cli_state(args.input2)
        spec = ExperimentSpec(pairs=((q1, q2),))
    elif default is not None:
        spec = default
    else:
        raise ValueError("provide --config, or both --input1 and --input2")
    return _apply_overrides(spec, args)


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _emit_table(table, args) -> int:
    if args.out == "-":
        emit(table, args.format, sys.stdout)
    else:
        emit(table, args.format, args.out)
    if table.all_failed():
        print("error: every pair failed", file=sys.stderr)
        return 2
    return 0


def _serialize_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def _cmd_tomography(args) -> int:
    with open(args.counts, encoding="utf-8") as fh:
        counts = CountsRecord.from_json(fh.read())
    estimate = mle_reconstruct(counts)
    nan = float("nan")
    if args.target:
        target = _parse_cli_state(args.target)
        rng = RandomSource(args.seed)
        (f, f_std), (d, d_std) = bootstrap_errors(counts, target, args.resamples, rng)
        result = ReconstructionResult(
            estimate.matrix, "mle", f, f_std, d, d_std, args.resamples
        )
    else:
        result = ReconstructionResult(estimate.matrix, "mle", nan, nan, nan, nan, 0)
    payload = {
        "rho": _serialize_matrix(result.rho),
        "method": result.method,
        "fidelity_to_target": result.fidelity_to_target,
        "fidelity_std": result.fidelity_std,
        "distance_to_target": result.distance_to_target,
        "distance_std": result.distance_std,
        "bootstrap_samples": result.bootstrap_samples,
        "linear_inversion": _serialize_matrix(linear_inversion(counts)),
        "counts": counts.as_dict(),
    }
    _write(json.dumps(payload, indent=2, allow_nan=True) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1

    try:
        if args.command == "simulate":
            table = run_experiment(_spec_from_args(args))
            return _emit_table(table, args)
        if args.command == "table1":
            table = run_experiment(_apply_overrides(builtin_table1(), args))
            return _emit_table(table, args)
        if args.command == "sweep":
            spec = _spec_from_args(args, default=builtin_table1())
            grid = [float(x) for x in args.grid.split(",") if x.strip() != ""]
            table = sweep(spec, args.parameter, grid)
            return _emit_table(table, args)
        if args.command == "tomography":
            return _cmd_tomography(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ReconstructionError, ZeroSuccessError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
