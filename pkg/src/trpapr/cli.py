"""Command-line harness: table2 | ccdf | convergence | sensing | aacf."""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import harness
from .config import ExperimentConfig, load_config


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trpapr",
        description="Tone-reservation PAPR reduction and sensing evaluation harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("table2", "mean PAPR and per-symbol runtime per method"),
        ("ccdf", "PAPR CCDF curves for no-reduction / proposed / QCQP"),
        ("convergence", "per-iteration traces of the proposed solver for each p"),
        ("sensing", "matched-filter ranging RMSE vs SNR per waveform family"),
        ("aacf", "aperiodic autocorrelation and PSL per waveform family"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", type=Path, default=None, help="YAML experiment config")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--out", type=Path, default=None, help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads")
        p.add_argument("--json", action="store_true", help="also mirror each CSV as JSON")
    return parser


def _load(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, master_seed=args.seed)
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out_dir=str(args.out))
    return cfg


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _load(args)
        out_dir = Path(cfg.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "table2":
            paths = harness.emit_table2(harness.run_table2(cfg), out_dir, args.json)
        elif args.command == "ccdf":
            paths = harness.emit_ccdf(harness.run_ccdf(cfg, args.threads), out_dir, args.json)
        elif args.command == "convergence":
            paths = harness.emit_convergence(harness.run_convergence(cfg), out_dir, args.json)
        elif args.command == "sensing":
            paths = harness.emit_ranging(harness.run_ranging(cfg, args.threads), out_dir, args.json)
        elif args.command == "aacf":
            paths = harness.emit_aacf(harness.run_aacf(cfg, args.threads), out_dir, args.json)
        else:  # unreachable with required=True
            raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
