"""Command-line front end.

Exit codes: 0 success, 1 a verification failed (e.g. invalid flip probability
outside D), 2 malformed input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__, config
from .errors import HyperbitError, Infeasible, InvalidFlipProbability, NotFound
from .harness import find_counterexample, random_instance, verify_equivalence
from .protocol import (
    SIMULATION_CSV_HEADER,
    StrategyWeights,
    pw_strategy,
    simulate_protocol,
)
from .quantum_core import bell_chsh_instance
from .regions import (
    HELIX_CSV_HEADER,
    RegionPoint,
    gap_oracle,
    helix,
    minimax_gap,
    scan_region,
    target_t,
    weights_for,
    z_aware_weights,
)
from .serialization import dump_instance, load_instance

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _floats(text: str, n: int, what: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise InputError(f"{what} must be {n} comma-separated numbers, got {text!r}") from None
    if len(vals) != n:
        raise InputError(f"{what} must have {n} components, got {len(vals)}")
    return vals


def _ints(text: str, n: int, what: str) -> list[int]:
    vals = _floats(text, n, what)
    if any(v != int(v) or v < 1 for v in vals):
        raise InputError(f"{what} must be positive integers, got {text!r}")
    return [int(v) for v in vals]


def _meta(args, seed=None) -> dict:
    return {"tool": "hyperbit", "version": __version__, "seed": seed,
            "tolerance": args.tol}


def _csv_preamble(args, seed=None) -> str:
    return f"# hyperbit {__version__} seed={seed} tolerance={args.tol!r}\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_verify(args) -> int:
    try:
        inst = load_instance(args.instance)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read instance: {exc}") from None
    report = verify_equivalence(inst, args.mode)
    if args.format == "csv":
        _emit(_csv_preamble(args) + report.to_csv(), args.out)
    else:
        data = report.to_dict()
        data["meta"] = _meta(args)
        _emit(_json(data), args.out)
    return EXIT_OK if report.verdict else EXIT_FAIL


def _strategy_from(text: str, p: RegionPoint, tol: float):
    name, _, rest = text.partition(":")
    if name == "pw":
        return pw_strategy(p.x, p.y, tol)
    if name == "fixed":
        return weights_for(p.x, p.y, tol)
    if name == "z-aware":
        return z_aware_weights(p.x, p.y, p.z, tol)
    if name == "weights":
        k = _floats(rest, 4, "weights")
        try:
            return StrategyWeights(*k)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    raise InputError(f"unknown strategy {text!r}; use pw, fixed, z-aware or weights:k1,k2,k3,k4")


def cmd_simulate(args) -> int:
    x, y, z = _floats(args.point, 3, "--point")
    if abs(z) > 1:
        raise InputError("|z| must be at most 1")
    p = RegionPoint(x, y, z)
    base = {"meta": _meta(args, args.seed), "point": {"x": x, "y": y, "z": z, "t": target_t(p)},
            "strategy": args.strategy}
    try:
        strategy = _strategy_from(args.strategy, p, args.tol)
    except (InvalidFlipProbability, Infeasible) as exc:
        base["failure"] = f"{type(exc).__name__}: {exc}"
        _emit(_json(base), args.out)
        return EXIT_FAIL
    report = simulate_protocol(p, strategy, args.samples, args.seed, args.shared_bit)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SIMULATION_CSV_HEADER)
        w.writerow(report.csv_row(f"{x!r};{y!r};{z!r}", args.strategy))
        _emit(_csv_preamble(args, args.seed) + buf.getvalue(), args.out)
    else:
        base.update(report.to_dict())
        base.pop("backend", None)
        base["target"] = target_t(p)
        _emit(_json(base), args.out)
    return EXIT_OK if report.passed() else EXIT_FAIL


def cmd_scan(args) -> int:
    nx, ny, nz = _ints(args.grid, 3, "--grid")
    result = scan_region(nx, ny, nz, with_gap=args.gap,
                         volume_samples=args.volume_samples, seed=args.seed, tol=args.tol)
    _emit(_csv_preamble(args, args.seed) + result.to_csv(), args.out)
    summary = result.summary()
    summary["meta"] = _meta(args, args.seed)
    if args.summary:
        Path(args.summary).write_text(_json(summary), encoding="utf-8")
    elif args.out:
        sys.stdout.write(_json(summary))
    return EXIT_OK


def cmd_gap(args) -> int:
    x, y = _floats(args.point, 2, "--point")
    if x * x + y * y > 1 + args.tol:
        raise InputError("(x, y) must lie in the unit disk")
    data = minimax_gap(x, y, args.tol).to_dict()
    if args.oracle_steps:
        data["oracle_gap"] = gap_oracle(x, y, args.oracle_steps, args.tol)
        data["oracle_steps"] = args.oracle_steps
    data["meta"] = _meta(args)
    _emit(_json(data), args.out)
    return EXIT_OK


def cmd_helix(args) -> int:
    if args.steps < 2:
        raise InputError("--steps must be at least 2")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HELIX_CSV_HEADER)
    for tau, branch, p in helix(args.steps):
        w.writerow([repr(tau), f"{branch:+d}", repr(p.x), repr(p.y), repr(p.z),
                    repr(target_t(p))])
    _emit(_csv_preamble(args) + buf.getvalue(), args.out)
    return EXIT_OK


def cmd_counterexample(args) -> int:
    nx, ny = _ints(args.grid, 2, "--grid")
    try:
        rec = find_counterexample(nx, ny, tol=args.tol)
    except NotFound as exc:
        _emit(_json({"meta": _meta(args), "failure": str(exc)}), args.out)
        return EXIT_FAIL
    data = rec.to_dict()
    data["meta"] = _meta(args)
    _emit(_json(data), args.out)
    return EXIT_OK


def cmd_instance(args) -> int:
    if args.bell:
        inst = bell_chsh_instance()
    else:
        da, db, na, nb = _ints(args.random, 4, "--random")
        inst = random_instance(da, db, na, nb, args.seed,
                               bob_projective=not args.contraction)
    _emit(dump_instance(inst) + "\n", args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    from . import selftest

    return EXIT_OK if selftest.run() else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperbit", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"hyperbit {__version__}")
    ap.add_argument("--tol", type=float, default=None,
                    help=f"region tolerance (default: ${config.TOL_ENV_VAR} or {config.REGION_TOL})")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="compare quantum and hyperbit sides of an instance")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["pw", "fixed", "z-aware"], default="pw")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte Carlo run of one strategy at one point")
    p.add_argument("--point", required=True, help="x,y,z")
    p.add_argument("--strategy", default="pw",
                   help="pw | fixed | z-aware | weights:k1,k2,k3,k4")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shared-bit", choices=["alice", "fair"], default="alice")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scan", help="label a grid over [-1, 1]^3 by region")
    p.add_argument("--grid", default="21,21,21", help="nx,ny,nz")
    p.add_argument("--gap", action="store_true", help="fill the gap column")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--volume-samples", type=int, default=200_000)
    p.add_argument("--out")
    p.add_argument("--summary")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("gap", help="minimax gap of z-independent strategies at (x, y)")
    p.add_argument("--point", required=True, help="x,y")
    p.add_argument("--oracle-steps", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gap)

    p = sub.add_parser("helix", help="points of the two helices on the cylinder")
    p.add_argument("--steps", type=int, default=181)
    p.add_argument("--out")
    p.set_defaults(func=cmd_helix)

    p = sub.add_parser("counterexample", help="certified point where no fixed strategy works")
    p.add_argument("--grid", default="41,41", help="nx,ny")
    p.add_argument("--out")
    p.set_defaults(func=cmd_counterexample)

    p = sub.add_parser("instance", help="write an instance JSON file")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--bell", action="store_true")
    g.add_argument("--random", help="dim_alice,dim_bob,n_alice,n_bob")
    p.add_argument("--contraction", action="store_true",
                   help="Bob observables with spectrum in [-1, 1] instead of +-1")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_instance)

    p = sub.add_parser("selftest", help="run the built-in invariant checks")
    p.set_defaults(func=cmd_selftest)
    return ap


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.tol is None:
            args.tol = config.default_tolerance()
        if args.tol <= 0:
            raise InputError("--tol must be positive")
        if getattr(args, "samples", 1) < 1:
            raise InputError("--samples must be positive")
        if getattr(args, "volume_samples", 0) < 0:
            raise InputError("--volume-samples must be non-negative")
        return args.func(args)
    except (InputError, HyperbitError, ValueError, OSError) as exc:
        print(f"hyperbit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
