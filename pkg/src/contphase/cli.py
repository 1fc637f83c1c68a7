"""
Command-line entry point.

    contphase run --config cfg.yaml [--output out.csv] [--format csv|json]
    contphase verify --tier fast|full
    contphase --version

Exit codes: 0 success, 1 config error, 2 numerical error, 3 verification
failure.  CONTPHASE_WORKERS bounds the sweep worker pool (all cores when
unset).
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .config import ConfigError, OutputSpec, load_config
from .core import NumericsError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="contphase",
        description="Geometric phases of continuous-spectrum systems under "
                    "slow transport: experiments, sweeps, and verification.")
    parser.add_argument("--version", action="version",
                        version=f"contphase {__version__}")
    sub = parser.add_subparsers(dest="command")

    run_p = sub.add_parser("run", help="run a configured experiment")
    run_p.add_argument("--config", required=True, help="YAML config path")
    run_p.add_argument("--output", help="override output.path")
    run_p.add_argument("--format", choices=("csv", "json"),
                       help="override output.format")

    ver_p = sub.add_parser("verify", help="run the acceptance criteria")
    ver_p.add_argument("--tier", choices=("fast", "full"), default="fast",
                       help="fast skips the minutes-scale wavepacket oracle")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    from .experiments import run_experiment, write_record

    try:
        cfg = load_config(args.config)
        if args.output or args.format:
            out = OutputSpec(path=args.output or cfg.output.path,
                             format=args.format or cfg.output.format)
            cfg = type(cfg)(experiment=cfg.experiment, constants=cfg.constants,
                            model=cfg.model, sweep=cfg.sweep,
                            scheme=cfg.scheme, output=out)
    except (ConfigError, FileNotFoundError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    try:
        record = run_experiment(cfg)
        write_record(record, cfg.output.path, cfg.output.format)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 1
    except (NumericsError, ValueError, FloatingPointError) as e:
        print(f"numerical error: {e}", file=sys.stderr)
        return 2
    print(f"{record.experiment}: {len(record.rows)} rows -> "
          f"{cfg.output.path} [{cfg.output.format}] "
          f"(digest {record.config_digest[:23]}...)")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    from .acceptance import run_acceptance

    results = run_acceptance(args.tier)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed "
          f"({args.tier} tier)")
    return 3 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "verify":
        return _cmd_verify(args)
    parser.print_help()
    return 0


if __name__ == "__main__":
    sys.exit(main())
