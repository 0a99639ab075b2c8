"""Command-line experiment pipeline.

Verbs:
  gen      write a seeded instance bank
  run      sweep one algorithm over the bank, emit run/aggregate CSVs
  spectra  hardness diagnostics table (relevant gap, quasi-optimal counts)
  report   render summary tables and figures from result CSVs

Exit codes: 0 success, 2 configuration error, 3 run finished with partial
failures (failed cells recorded per row, remaining cells intact).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments, report
from .instances import load_instances, save_instances

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARTIAL = 3


def _parse_sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list '{text}'") from None
    if not sizes:
        raise argparse.ArgumentTypeError("size list is empty")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nppsim",
        description="Annealing / variational-circuit benchmarks on number partitioning",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a seeded instance bank")
    gen.add_argument("--sizes", type=_parse_sizes, default=(6, 7, 8, 9, 10))
    gen.add_argument("--count", type=int, default=10, help="instances per size")
    gen.add_argument("--seed", type=int, default=1)
    gen.add_argument("--out", type=Path, default=Path("instances.txt"))

    run = sub.add_parser("run", help="run one algorithm over the bank")
    run.add_argument("--bank", type=Path, required=True)
    run.add_argument("--algo", required=True,
                     choices=["qa", "qa-path", "qa-fields", "qaoa", "qaoa-adaptive"])
    run.add_argument("--sizes", type=_parse_sizes, default=None,
                     help="restrict to these sizes (default: all in bank)")
    run.add_argument("--T", type=float, default=50.0, help="total annealing time")
    run.add_argument("--C", type=int, default=6, help="sine-path cutoff")
    run.add_argument("--p-max", type=int, default=10, help="largest circuit depth")
    run.add_argument("--restarts", type=int, default=None,
                     help="multistart count (default: 50 anneal / 200 circuit)")
    run.add_argument("--budget", type=float, default=1.0,
                     help="scale factor on restart counts for quick runs")
    run.add_argument("--seed", type=int, default=1, help="optimizer seed")
    run.add_argument("--out", type=Path, default=Path("results"))
    run.add_argument("--jobs", type=int, default=1)

    spec = sub.add_parser("spectra", help="hardness diagnostics table")
    spec.add_argument("--bank", type=Path, required=True)
    spec.add_argument("--sizes", type=_parse_sizes, default=None)
    spec.add_argument("--delta", type=float, default=0.1)
    spec.add_argument("--grid", type=int, default=201, help="lambda grid points")
    spec.add_argument("--params-from", type=Path, default=None,
                      help="run output dir supplying optimized path/field parameters")
    spec.add_argument("--out", type=Path, default=Path("results"))
    spec.add_argument("--jobs", type=int, default=1)

    rep = sub.add_parser("report", help="render tables and figures from results")
    rep.add_argument("--results", type=Path, required=True)
    rep.add_argument("--out", type=Path, default=None,
                     help="output dir (default: the results dir)")
    return parser


def _cmd_gen(args) -> int:
    if args.count < 0:
        print("error: --count must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    if args.count == 0:
        print("warning: count=0 writes an empty bank", file=sys.stderr)
    bank = experiments.generate_bank(args.sizes, args.count, args.seed)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_instances(bank, args.out)
    print(f"wrote {len(bank)} instances to {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    bank = load_instances(args.bank)
    sizes = args.sizes if args.sizes is not None else tuple(sorted({i.n for i in bank}))
    cfg = experiments.ExperimentConfig(
        algorithm=args.algo,
        sizes=sizes,
        seed=args.seed,
        T=args.T,
        C=args.C,
        p_max=args.p_max,
        restarts=args.restarts,
        budget=args.budget,
        jobs=args.jobs,
    )
    matched = [i for i in bank if i.n in set(sizes)]
    if not matched:
        print(f"error: bank {args.bank} has no instances of sizes {sizes}", file=sys.stderr)
        return EXIT_CONFIG
    failures = experiments.run_experiment(cfg, bank, args.out)
    print(f"{args.algo}: {len(matched)} instances swept, {failures} failed cells, "
          f"output in {args.out}")
    return EXIT_PARTIAL if failures else EXIT_OK


def _cmd_spectra(args) -> int:
    bank = load_instances(args.bank)
    if args.grid < 51:
        print(f"warning: grid={args.grid} is coarse; gap minima may be "
              "under-resolved (51+ recommended)", file=sys.stderr)
    experiments.run_spectra(
        bank, args.out,
        delta=args.delta,
        grid_points=args.grid,
        params_from=args.params_from,
        sizes=args.sizes,
        jobs=args.jobs,
    )
    print(f"spectra table written to {args.out}")
    return EXIT_OK


def _cmd_report(args) -> int:
    written = report.render_report(args.results, args.out)
    target = args.out if args.out is not None else args.results
    print(f"report wrote {', '.join(written)} to {target}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {
        "gen": _cmd_gen,
        "run": _cmd_run,
        "spectra": _cmd_spectra,
        "report": _cmd_report,
    }[args.command]
    try:
        return handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
