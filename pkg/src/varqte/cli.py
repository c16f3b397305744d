"""Command-line interface.

    varqte run      [--config cfg.json] [flag overrides] --out run.csv
    varqte validate [--config cfg.json] [flag overrides]

Flags override individual fields of the JSON config.  Exit codes:
0 success, 1 failed validation checks, 2 configuration error,
3 integration failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, EvolutionConfig, SolverSpec
from .ode import IntegrationError
from .run import run
from .selftest import validate


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--preset", choices=("illustrative", "ising", "hydrogen"))
    parser.add_argument("--evolution", choices=("real", "imag"))
    parser.add_argument("--ode", choices=("standard", "argmin"))
    parser.add_argument("--solver", choices=("euler", "rk54"))
    parser.add_argument("--t-final", type=float, dest="t_final")
    parser.add_argument("--steps", type=int, help="Euler step count")
    parser.add_argument("--rel-tol", type=float, dest="rel_tol")
    parser.add_argument("--abs-tol", type=float, dest="abs_tol")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", help="output CSV path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="varqte",
        description="Variational quantum time evolution with a-posteriori error bounds",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="execute one configured evolution")
    _add_common_flags(run_parser)
    val_parser = sub.add_parser("validate", help="run the self-test cross-checks")
    _add_common_flags(val_parser)
    return parser


def resolve_config(args: argparse.Namespace) -> EvolutionConfig:
    config = EvolutionConfig.load(args.config) if args.config else EvolutionConfig()
    for name in ("preset", "evolution", "ode", "t_final", "seed", "out"):
        value = getattr(args, name, None)
        if value is not None:
            setattr(config, name, value)
    if args.solver is not None:
        config.solver = SolverSpec(kind=args.solver)
    if args.steps is not None:
        config.solver.n_steps = args.steps
        config.solver.kind = "euler" if args.solver is None else config.solver.kind
    if args.rel_tol is not None:
        config.solver.rel_tol = args.rel_tol
    if args.abs_tol is not None:
        config.solver.abs_tol = args.abs_tol
    config.validate()
    return config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        report = validate(config)
        for line in report.lines():
            print(line)
        return 0 if report.all_passed else 1

    try:
        result = run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration failure: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {result.csv_path} ({result.manifest['n_rows']} rows)")
    print(json.dumps(result.manifest["summary"], indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
