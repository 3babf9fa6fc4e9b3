"""Command-line entry point.

    narlab run --task 1 --seeds 0..9 --out results/
    narlab run --task 2 --seed 7 --config threshold=0.6
    narlab shell < script.nal
"""
from __future__ import annotations

import argparse
import csv
import logging
import re
import sys
from pathlib import Path
from statistics import median

from .lab import EngineFault, accuracy_rows, hypothesis_rows, run_experiment
from .narsese import DIRECTIVES
from .shell import EXPERIMENT_CONFIG, Session, repl

ACCURACY_FIELDS = ["task", "seed", "phase", "block", "accuracy"]
HYPOTHESIS_FIELDS = ["task", "seed", "clock", "hypothesis", "frequency", "confidence"]
SUMMARY_FIELDS = ["task", "phase", "block", "median_accuracy", "seeds"]

EXIT_OK, EXIT_FAULT, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def seed_range(text: str) -> list[int]:
    """``"7"`` -> [7]; ``"0..9"`` -> [0, ..., 9] (inclusive)."""
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:\.\.\s*(-?\d+)\s*)?", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad seed spec {text!r}; use N or A..B")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) is not None else lo
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
    return list(range(lo, hi + 1))


def config_override(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    key = key.strip().lstrip("*")
    if not sep or not value.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    if key not in DIRECTIVES:
        raise argparse.ArgumentTypeError(f"unknown config key {key!r}")
    return key, value.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="narlab", description="Sensorimotor reasoner and conditioning lab.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run one experiment over one or more seeds")
    run.add_argument("--task", type=int, choices=[1, 2, 3], required=True)
    seeds = run.add_mutually_exclusive_group()
    seeds.add_argument("--seed", type=seed_range, dest="seeds")
    seeds.add_argument("--seeds", type=seed_range, dest="seeds")
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--config", type=config_override, action="append", default=[], metavar="KEY=VALUE")

    sh = sub.add_parser("shell", help="read protocol lines from stdin")
    sh.add_argument("--experiment", action="store_true", help="preload the experiment configuration block")
    sh.add_argument("--config", type=config_override, action="append", default=[], metavar="KEY=VALUE")
    return parser


def _write_csv(path: Path, fields: list[str], rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def summarize(task: int, per_seed: list[list[dict]]) -> list[dict]:
    """Median per-block accuracy across seeds."""
    out = []
    for block_rows in zip(*per_seed):
        first = block_rows[0]
        out.append({
            "task": task,
            "phase": first["phase"],
            "block": first["block"],
            "median_accuracy": median(r["accuracy"] for r in block_rows),
            "seeds": len(block_rows),
        })
    return out


def batch_run(args) -> int:
    seeds = args.seeds or [0]
    overrides = dict(args.config)
    try:
        args.out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create {args.out}: {exc}", file=sys.stderr)
        return EXIT_IO
    per_seed = []
    for seed in seeds:
        try:
            result = run_experiment(args.task, seed, overrides)
        except EngineFault as exc:
            print(f"error: task {args.task} seed {seed}: {exc}", file=sys.stderr)
            return EXIT_FAULT
        stem = args.out / f"task{args.task}_seed{seed}"
        acc = accuracy_rows(result)
        per_seed.append(acc)
        try:
            _write_csv(stem.with_name(stem.name + "_accuracy.csv"), ACCURACY_FIELDS, acc)
            _write_csv(stem.with_name(stem.name + "_hypotheses.csv"), HYPOTHESIS_FIELDS, hypothesis_rows(result))
            stem.with_name(stem.name + "_transcript.jsonl").write_text(result.transcript.dumps())
        except OSError as exc:
            print(f"error: writing results for seed {seed}: {exc}", file=sys.stderr)
            return EXIT_IO
        logging.info("task %d seed %d: %s", args.task, seed, result.metrics.per_block_accuracy)
    try:
        _write_csv(args.out / f"task{args.task}_summary.csv", SUMMARY_FIELDS, summarize(args.task, per_seed))
    except OSError as exc:
        print(f"error: writing summary: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run_shell(args) -> int:
    session = Session()
    preload = list(EXPERIMENT_CONFIG) if args.experiment else []
    preload += [f"*{k}={v}" for k, v in args.config]
    for line in preload:
        for out in session.exec_line(line):
            print(out)
    return repl(sys.stdin, sys.stdout, session)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.command == "run":
        return batch_run(args)
    return run_shell(args)


if __name__ == "__main__":
    sys.exit(main())
