"""Command-line entry point.

Exit codes: 0 success, 1 configuration error, 2 runtime/numeric error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .errors import ConfigError, SimulationError
from .harness import load_config, load_grid, run_sweep, write_csv
from .harness import LinkConfig, parse_bits
from .power import power_breakdown

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME, EXIT_IO = 0, 1, 2, 3


def _add_overrides(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, help="override the base seed")
    p.add_argument("--trials", type=int, help="override the trial count")
    p.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lowres-mimo",
        description="mmWave MIMO-OFDM link simulator with low-resolution converters",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a single configuration")
    sim.add_argument("--config", required=True, help="key = value configuration file")
    sim.add_argument("--out", required=True, help="output CSV path")
    _add_overrides(sim)

    sweep = sub.add_parser("sweep", help="run a grid of configurations")
    sweep.add_argument("--grid", required=True, help="grid file (comma-separated values)")
    sweep.add_argument("--out", required=True, help="output CSV path")
    _add_overrides(sweep)

    power = sub.add_parser("power", help="print the transceiver power breakdown")
    power.add_argument("--bits", required=True)
    power.add_argument("--mtx", type=int, required=True)
    power.add_argument("--mrx", type=int, required=True)
    return parser


def _apply_overrides(configs: list[LinkConfig], args) -> list[LinkConfig]:
    changes = {k: getattr(args, k) for k in ("seed", "trials") if getattr(args, k) is not None}
    if not changes:
        return configs
    try:
        return [c.replace(**changes) for c in configs]
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _run(args) -> int:
    if args.command == "power":
        params = LinkConfig().power
        bits = parse_bits(args.bits)
        for name, value in power_breakdown(params, args.mtx, args.mrx, bits).items():
            print(f"{name:14s} {value:12.5f}")
        return EXIT_OK

    if args.command == "simulate":
        configs = [load_config(args.config)]
    else:
        configs = load_grid(args.grid)
    configs = _apply_overrides(configs, args)
    result = run_sweep(configs, threads=args.threads)
    write_csv(result, args.out)
    failed = [r for r in result.rows if r.error]
    for row in failed:
        print(f"row failed: {row.error}", file=sys.stderr)
    return EXIT_RUNTIME if failed else EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SimulationError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
