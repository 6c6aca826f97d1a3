"""Command-line front end: run sweeps, evaluate allocations, solve one-shots."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .bounds import bound_report
from .evaluate import exact_failure_prob, monte_carlo_failure_prob
from .harness import (
    EXIT_CONFIG,
    ConfigError,
    _solve_strategy,
    parse_config,
    run_experiment,
)
from .model import Allocation, make_profile


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}") from exc


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="storalloc",
        description="Storage allocations over unreliable nodes: evaluate, bound, solve.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured ensemble sweep and write a CSV")
    run.add_argument("--config", required=True, help="flat key=value config file")
    run.add_argument("--out", help="override the output CSV path")
    run.add_argument("--seed", type=int, help="override the config seed")
    run.add_argument("--trials", type=int, help="override the Monte Carlo trial count")

    ev = sub.add_parser("eval", help="failure probability and all bounds for one allocation")
    ev.add_argument("--probs", required=True, type=_float_list)
    ev.add_argument("--alloc", required=True, type=_float_list)
    ev.add_argument("--budget", type=float, help="budget; defaults to the allocation total")
    ev.add_argument("--trials", type=int, default=100_000,
                    help="Monte Carlo trials when exact evaluation is out of reach")
    ev.add_argument("--seed", type=int, default=0)

    so = sub.add_parser("solve", help="compute an allocation for a profile and budget")
    so.add_argument("--probs", required=True, type=_float_list)
    so.add_argument("--budget", required=True, type=float)
    so.add_argument(
        "--method", required=True, choices=("spread", "closed", "hoeffding", "chernoff")
    )
    return parser


def _cmd_run(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            config = parse_config(fh.read())
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out is not None:
        config.output_path = args.out
    if args.seed is not None:
        config.seed = args.seed
    if args.trials is not None:
        config.trials = args.trials
    return run_experiment(config)


def _fmt_bound(value) -> str:
    return "undefined" if value is None else repr(float(value))


def _cmd_eval(args) -> int:
    budget = args.budget if args.budget is not None else sum(args.alloc)
    profile = make_profile(args.probs, budget)
    allocation = Allocation(amounts=np.asarray(args.alloc, dtype=float))
    uniform = len(set(args.alloc)) == 1
    if uniform or profile.n <= 25:
        est = exact_failure_prob(profile, allocation)
    else:
        est = monte_carlo_failure_prob(profile, allocation, trials=args.trials, seed=args.seed)
    report = bound_report(profile, allocation)
    print(f"pe={est.value!r} method={est.method} half_width={est.half_width!r}")
    print(f"hoeffding={_fmt_bound(report.hoeffding)}")
    chern = float(np.exp(report.chernoff_log)) if report.chernoff_log < 0 else None
    print(f"chernoff={_fmt_bound(chern)} t={report.chernoff_t!r}")
    print(f"spreading={_fmt_bound(report.spreading)}")
    print(f"closed_form={_fmt_bound(report.closed_form)}")
    return 0


def _cmd_solve(args) -> int:
    profile = make_profile(args.probs, args.budget)
    allocation, bound, diag, nonconverged = _solve_strategy(profile, args.method)
    print(",".join(repr(float(v)) for v in allocation.amounts))
    detail = ";".join(diag) if diag else "-"
    print(f"strategy={allocation.strategy} bound={_fmt_bound(bound)} diag={detail}",
          file=sys.stderr)
    return 3 if nonconverged else 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "eval":
            return _cmd_eval(args)
        return _cmd_solve(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
