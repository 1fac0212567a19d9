"""Command-line entry point.

    enrda run <config.yaml> [--out DIR] [--workers N]
    enrda preset <ad1d|ad2d|lorenz63> [--replicates K] [--seed S] [--out DIR]
    enrda validate <config.yaml>
    enrda ot-demo [--out DIR]

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from . import config as config_mod
from .config import ConfigError
from .demo import write_ot_demo
from .presets import PRESET_NAMES, build_preset
from .runner import run_experiment


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="enrda",
        description="Twin-experiment harness for transport-based ensemble "
        "data assimilation and its Euclidean baselines.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run an experiment from a config file")
    run_p.add_argument("config", help="YAML experiment configuration")
    run_p.add_argument("--out", default=None, help="output directory override")
    run_p.add_argument("--workers", type=int, default=None)

    preset_p = sub.add_parser("preset", help="run one of the reference setups")
    preset_p.add_argument("name", choices=PRESET_NAMES)
    preset_p.add_argument("--replicates", type=int, default=None)
    preset_p.add_argument("--seed", type=int, default=None)
    preset_p.add_argument("--out", default=None, help="output directory override")
    preset_p.add_argument("--workers", type=int, default=None)

    val_p = sub.add_parser("validate", help="schema-check a config file")
    val_p.add_argument("config")

    demo_p = sub.add_parser(
        "ot-demo", help="emit transport showcase CSVs (geodesics, sweeps)"
    )
    demo_p.add_argument("--out", default="ot-demo", help="output directory")
    return parser


def _run_and_report(cfg, out, workers) -> int:
    summary = run_experiment(cfg, output_dir=out, workers=workers)
    failed = summary["replicates_failed"]
    print(
        f"{cfg.name}: {summary['replicates_completed']}/{cfg.replicates} replicates "
        f"in {summary['elapsed_seconds']:.1f}s"
    )
    for name, metrics in summary["methods"].items():
        print(
            f"  {name}: bias {metrics['bias_overall']:.4f}  "
            f"ubrmse {metrics['ubrmse_overall']:.4f}"
        )
    if failed:
        for entry in failed:
            print(f"  replicate {entry['replicate']} failed: {entry['error']}",
                  file=sys.stderr)
        return 1
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            config_mod.load(args.config)
            print("configuration is valid")
            return 0
        if args.command == "run":
            cfg = config_mod.load(args.config)
        elif args.command == "preset":
            cfg = build_preset(args.name, args.replicates, args.seed)
            if args.out is None and cfg.output_dir is None:
                cfg = dataclasses.replace(cfg, output_dir=f"out/{args.name}")
        elif args.command == "ot-demo":
            paths = write_ot_demo(args.out)
            for name, path in paths.items():
                print(f"{name}: {path}")
            return 0
    except (ConfigError, FileNotFoundError, ValueError) as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2

    try:
        return _run_and_report(cfg, args.out, args.workers)
    except Exception as err:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(err).__name__}: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
