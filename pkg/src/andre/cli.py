"""Command line entry point: ``andre solve``, ``andre sweep``, ``andre list-problems``.

Exit status: 0 when every run verified all subdomains, 2 when a run
aborted at the neuron cap, 1 on usage errors.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import problems
from .experiments import sweep
from .export import export
from .optimizer import TrainConfig
from .refinement import AndreConfig, run

EXIT_OK, EXIT_USAGE, EXIT_ABORTED = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", required=True, help="registered problem name (see list-problems)")
    p.add_argument("--sigma", type=float, help="verification error bound (default: per problem)")
    p.add_argument("--delta", type=float, default=0.5, help="subdomain resize factor")
    p.add_argument("--order", type=int, default=5, help="number of networks per equation")
    p.add_argument("--epochs", type=int, default=100_000, help="Adam epochs per training attempt")
    p.add_argument("--increments", type=int, help="incremental-learning steps (default: per problem)")
    p.add_argument("--ntp", type=int, default=9, help="training intervals per subdomain")
    p.add_argument("--nvp", type=int, default=11, help="verification intervals per subdomain")
    p.add_argument("--ansatz", choices=["hard", "learned"], default="hard")
    p.add_argument("--hidden", type=int, default=5, help="initial hidden neurons")
    p.add_argument("--neuron-cap", type=int, default=51)
    p.add_argument("--ladder", type=_floats, default=(1e-3, 6e-3, 3.6e-2), help="learning-rate ladder a,b,c")
    p.add_argument("--min-size", type=float, default=0.1, help="subdomain width below which no further reduction")
    p.add_argument("--warm-start", action="store_true", help="retrain from the previous attempt's weights")
    p.add_argument("--t-end", type=float, help="right end of the time domain")
    p.add_argument("--paper-scale", action="store_true", help="use the full published domain instead of the desk-scale one")
    p.add_argument("--kappa0", type=float, help="initial predator population (ivp4)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true", help="log every training attempt")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="andre", description="Adaptive neural domain refinement for initial value problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("list-problems", help="show the registered problems")
    solve = sub.add_parser("solve", help="solve one problem and export the report")
    _add_run_flags(solve)
    sw = sub.add_parser("sweep", help="repeat a solve over several sigma or delta values")
    sw.add_argument("--param", choices=["sigma", "delta"], required=True)
    sw.add_argument("--values", type=_floats, required=True)
    sw.add_argument("--workers", type=int, help="parallel runs (default: $ANDRE_THREADS or CPU count)")
    _add_run_flags(sw)
    return parser


def _setup(args):
    params = {}
    if args.kappa0 is not None:
        if args.problem != "ivp4":
            raise ValueError("--kappa0 only applies to ivp4")
        params["kappa0"] = args.kappa0
    problem = problems.get_problem(args.problem, **params)
    if args.t_end is not None:
        problem = problem.with_domain(t_end=args.t_end)
    elif not args.paper_scale and problem.desk_t_end is not None:
        problem = problem.with_domain(t_end=problem.desk_t_end)
    config = AndreConfig(
        sigma=problem.sigma if args.sigma is None else args.sigma,
        delta=args.delta,
        min_subdomain_size=args.min_size,
        n_tp=args.ntp,
        n_vp=args.nvp,
        order=args.order,
        ansatz=args.ansatz,
        train=TrainConfig(epochs=args.epochs, increments=problem.increments if args.increments is None else args.increments),
        lr_ladder=tuple(args.ladder),
        hidden_count=args.hidden,
        neuron_cap=args.neuron_cap,
        warm_start=args.warm_start,
    )
    return problem, config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "list-problems":
        for name in problems.problem_names():
            p = problems.get_problem(name)
            print(f"{name:10s} [{p.t_start:g}, {p.t_end:g}]  sigma={p.sigma:g}  inc={p.increments}  {p.description}")
        return EXIT_OK

    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        problem, config = _setup(args)
    except (KeyError, ValueError) as exc:
        print(f"andre: error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == "solve":
        report = run(problem, config)
        export(report, args.out)
        agg = report.aggregates
        print(f"{report.status}: h={agg['h']} l1={agg['l1']} linf={agg['linf']} -> {args.out}")
        return EXIT_OK if report.completed else EXIT_ABORTED

    if args.param == "sigma" and args.sigma is not None:
        print("andre: error: --sigma conflicts with --param sigma", file=sys.stderr)
        return EXIT_USAGE
    try:
        rows = sweep(problem, config, args.param, args.values, workers=args.workers, out_dir=args.out)
    except ValueError as exc:
        print(f"andre: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    for row in rows:
        print(f"{args.param}={row['value']:g}: {row['status']} h={row.get('h')} l1={row.get('l1')}")
    return EXIT_OK if all(r["status"] == "completed" for r in rows) else EXIT_ABORTED


if __name__ == "__main__":
    sys.exit(main())
