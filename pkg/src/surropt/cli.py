"""Command-line interface.

Subcommands run the pipeline up to a named stage and emit that stage's
artifacts (stages are cheap and deterministic, so partial commands simply
recompute their prerequisites):

    surropt generate --config cfg.ini        sample the oracle into dataset.csv
    surropt train    --config cfg.ini        tune + train + test metrics
    surropt explain  --config cfg.ini        importances and PDP exports
    surropt optimize --config cfg.ini        predicted Pareto fronts
    surropt validate --config cfg.ini        oracle re-evaluation of fronts
    surropt report   --config cfg.ini        full run incl. indicators + report.json
    surropt run      --config cfg.ini        same as report

Exit codes: 0 success, 2 configuration error, 3 stage failure.
"""

from __future__ import annotations

import argparse
import sys

from .config import load_config
from .errors import ConfigError, StageError
from .pipeline import generate_to_csv, run

_STAGE_FOR_COMMAND = {
    "train": "train",
    "explain": "explain",
    "optimize": "optimize",
    "validate": "validate",
    "report": None,  # full run
    "run": None,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="surropt", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("generate", "train", "explain", "optimize", "validate", "report", "run"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the INI config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--threads", type=int, default=None, help="worker-count hint")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.output_dir = args.out
        if args.threads is not None:
            cfg.threads = args.threads
        cfg.validate()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "generate":
            path = generate_to_csv(cfg)
            print(f"wrote {path}")
        else:
            report = run(cfg, until=_STAGE_FOR_COMMAND[args.command])
            done = ", ".join(report.completed_stages)
            print(f"completed stages: {done}")
            print(f"artifacts in {cfg.output_dir}: {len(report.files)} files")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
