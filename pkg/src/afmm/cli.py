"""Command-line entry point: ``afmm {gen,mul,bench,report,plot-data,verify}``."""
from __future__ import annotations

import argparse
import sys
import warnings

from . import bench
from .kernels import DEFAULT_STRASSEN_CUTOFF, KernelId, multiply
from .matrix import SEED_MASK, DomainError, GeneratorSpec, Role, format_matrix_text, generate, read_matrix
from .verify import SUITES, Verifier, run_suite

KERNEL_CHOICES = [k.value for k in KernelId]


def _unit_interval(s: str) -> float:
    v = float(s)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{s} is not in [0, 1]")
    return v


def _positive_float(s: str) -> float:
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"{s} is not positive")
    return v


def _positive_int(s: str) -> int:
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"{s} is not a positive integer")
    return v


def _nonneg_int(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"{s} is negative")
    return v


def _seed(s: str) -> int:
    v = int(s)
    if not 0 <= v <= SEED_MASK:
        raise argparse.ArgumentTypeError(f"{s} is not an unsigned 64-bit integer")
    return v


def _sizes(s: str) -> list[int]:
    try:
        sizes = [int(tok) for tok in s.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {s!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("size list is empty")
    return sizes


def _add_bench_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kernel", required=True, choices=KERNEL_CHOICES)
    p.add_argument("--sizes", required=True, type=_sizes, help="comma-separated, strictly increasing")
    p.add_argument("--d1", type=_unit_interval, default=1 / 3)
    p.add_argument("--d2", type=_unit_interval, default=1 / 2)
    p.add_argument("--mu", type=_positive_float, default=1.0)
    p.add_argument("--reps", type=_positive_int, default=20)
    p.add_argument("--warmups", type=_nonneg_int, default=2)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--cutoff", type=_positive_int, default=DEFAULT_STRASSEN_CUTOFF)
    p.add_argument("--out", default="-", help="CSV destination ('-' for stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="afmm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write a random matrix in the text format")
    g.add_argument("--n", type=_positive_int, required=True)
    g.add_argument("--density", type=_unit_interval, default=1.0)
    g.add_argument("--mu", type=_positive_float, default=1.0)
    g.add_argument("--role", choices=[r.value for r in Role], default=Role.INTEGER.value)
    g.add_argument("--low", type=float, default=0.5)
    g.add_argument("--high", type=float, default=1.5)
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", default="-")

    m = sub.add_parser("mul", help="multiply two matrix files")
    m.add_argument("x")
    m.add_argument("y")
    m.add_argument("--kernel", choices=KERNEL_CHOICES, default=KernelId.IJK.value)
    m.add_argument("--cutoff", type=_positive_int, default=DEFAULT_STRASSEN_CUTOFF)

    b = sub.add_parser("bench", help="run an experiment plan and emit CSV")
    _add_bench_args(b)

    r = sub.add_parser("report", help="CSV records to a markdown table")
    r.add_argument("csv", nargs="?", help="records CSV (default: shipped Table 1 reference)")
    r.add_argument("--out", default="-")

    pd = sub.add_parser("plot-data", help="CSV records to per-configuration series files")
    pd.add_argument("csv", nargs="?", help="records CSV (default: shipped Table 1 reference)")
    pd.add_argument("--out", required=True, help="output directory")

    v = sub.add_parser("verify", help="run an acceptance suite")
    v.add_argument("suite", choices=[*SUITES, "all"])
    return parser


def parse_plan(argv: list[str]) -> bench.ExperimentPlan:
    """Parse ``bench`` flags into a validated plan; usage errors exit with status 2."""
    parser = argparse.ArgumentParser(prog="afmm bench")
    _add_bench_args(parser)
    return _plan_from_args(parser, parser.parse_args(argv))


def _plan_from_args(parser, args) -> bench.ExperimentPlan:
    try:
        return bench.ExperimentPlan(
            kernel=KernelId(args.kernel), sizes=tuple(args.sizes), d1=args.d1, d2=args.d2,
            mu_prime=args.mu, replications=args.reps, warmups=args.warmups,
            base_seed=args.seed, strassen_cutoff=args.cutoff,
        )
    except DomainError as exc:
        parser.error(str(exc))


def _write(text: str, dest: str) -> None:
    if dest == "-":
        sys.stdout.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def _records(path):
    return bench.reference_table1() if path is None else bench.parse_csv(path)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "gen":
        try:
            spec = GeneratorSpec(args.n, args.density, args.mu, Role(args.role), args.low, args.high)
        except DomainError as exc:
            parser.error(str(exc))
        _write(format_matrix_text(generate(spec, args.seed)), args.out)

    elif args.command == "mul":
        res = multiply(args.kernel, read_matrix(args.x), read_matrix(args.y), args.cutoff)
        sys.stdout.write(format_matrix_text(res.product))
        c = res.counts
        print(f"additions={c.additions} multiplications={c.multiplications} zero_skips={c.zero_skips}")

    elif args.command == "bench":
        plan = _plan_from_args(parser, args)
        with warnings.catch_warnings():
            warnings.simplefilter("always", bench.TimingWarning)
            records = bench.run_plan(plan)
        valid = [r for r in records if r.valid]
        if args.out == "-":
            bench.emit_csv(valid, sys.stdout)
        else:
            bench.emit_csv(valid, args.out)

    elif args.command == "report":
        _write(bench.emit_table(_records(args.csv)), args.out)

    elif args.command == "plot-data":
        for path in bench.emit_plot_data(_records(args.csv), args.out):
            print(path)

    elif args.command == "verify":
        names = list(SUITES) if args.suite == "all" else [args.suite]
        verifier = Verifier()
        results = [r for name in names for r in run_suite(name, verifier)]
        for r in results:
            print(r.line())
        failed = sum(not r.passed for r in results)
        print(f"{len(results) - failed}/{len(results)} criteria passed")
        return 1 if failed else 0

    return 0


if __name__ == "__main__":
    sys.exit(main())
