"""Command-line front end: train, evaluate, simulate-wave, export-plots."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, RunConfig, load_config
from .harness import (
    evaluate,
    export_plots,
    export_wave_panels,
    run_training,
    write_eval_csv,
)


def _load(path) -> RunConfig:
    if path is None:
        return RunConfig()
    return load_config(path)


def cmd_train(args) -> int:
    config = _load(args.config)
    overrides = {}
    if args.agent is not None:
        overrides["agent"] = args.agent
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.episodes is not None:
        overrides["episodes"] = args.episodes
    if args.out is not None:
        overrides["out_dir"] = args.out
    config = config.replace(**overrides)
    records, weights_path, log_path = run_training(config)
    landed = sum(r.landed for r in records)
    print(f"trained {config.agent}: {len(records)} episodes, {landed} landings")
    print(f"log:     {log_path}")
    print(f"weights: {weights_path}")
    return 0


def cmd_evaluate(args) -> int:
    config = _load(args.config)
    report = evaluate(
        args.weights,
        config,
        n_episodes=args.episodes,
        seed=args.seed,
        trace_dir=args.trace_dir,
    )
    print(report.summary())
    if args.out is not None:
        write_eval_csv(report, args.out)
        print(f"per-episode breakdown: {args.out}")
    return 0


def cmd_simulate_wave(args) -> int:
    config = _load(args.config)
    paths = export_wave_panels(config, args.out, seed=args.seed, duration=args.duration)
    for p in paths:
        print(p)
    return 0


def cmd_export_plots(args) -> int:
    root = Path(args.logs)
    if root.is_dir():
        logs = sorted(root.rglob("*train_log.csv"))
    else:
        logs = [root]
    config = _load(args.config) if args.config else None
    written = export_plots(logs, args.out, config=config)
    for p in written:
        print(p)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavedock",
        description="Wave-platform docking simulator and DRL training harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="train an agent and write log + weights")
    p.add_argument("--config", help="YAML run configuration (defaults used if omitted)")
    p.add_argument("--agent", choices=["dqn", "double", "dueling", "ppo"])
    p.add_argument("--seed", type=int)
    p.add_argument("--episodes", type=int)
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a frozen policy on fresh waves")
    p.add_argument("--weights", required=True)
    p.add_argument("--config")
    p.add_argument("--episodes", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="write per-episode breakdown CSV here")
    p.add_argument("--trace-dir", help="dump per-episode (t, z, z_w, zdot, U, r) traces")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate-wave", help="emit wave time-series and spectrum CSVs")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration", type=float, default=None)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_simulate_wave)

    p = sub.add_parser("export-plots", help="turn training logs into plot-ready CSVs")
    p.add_argument("logs", help="a train_log.csv file or a directory to scan")
    p.add_argument("--config", help="also emit wave panels from this config")
    p.add_argument("--out", default="plots")
    p.set_defaults(func=cmd_export_plots)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
