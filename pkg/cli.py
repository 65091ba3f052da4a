# In parallel-cfs/cli.py
"""
Command line entry point.

  python cli.py select     --input data.csv --class label [--engine vertical] ...
  python cli.py bench      --input data.csv --class label --workers 1,2,4 ...
  python cli.py discretize --input data.csv --class label --output coded.csv
  python cli.py generate   --rows 1000 --features 20 --relevant 2 --seed 7 --output syn.csv

Exit codes: 0 ok, 1 usage or configuration, 2 bad input data, 3 internal error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from selection_graph import run_selection
from tools.bench import run_bench
from tools.config import EngineConfig, SearchConfig, log_level
from tools.data_io import load_csv, load_discrete_csv, write_dataset_csv, write_discretized
from tools.dataset import generate_synthetic
from tools.discretize import discretize_mdl
from tools.errors import CfsError, ConfigError, DataError
from tools.utils import configure_logging, parse_float_list, parse_int_list

logger = logging.getLogger("cli")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

ENGINES = ("sequential", "horizontal", "vertical")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; 2 is reserved for data errors here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_input(p, required: bool = True) -> None:
    p.add_argument("--input", required=required, help="CSV file")
    p.add_argument("--class", dest="class_column", required=required,
                   help="class column name, or its 0-based index when no column has that name")
    p.add_argument("--no-header", dest="header", action="store_false",
                   help="the first line is data; columns are named c0, c1, ...")


def _add_engine(p) -> None:
    p.add_argument("--partitions", type=int, default=None)
    p.add_argument("--backend", choices=("threads", "processes"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="parallel-cfs", description="Correlation-based feature selection")
    parser.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (env CFS_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sel = sub.add_parser("select", help="run feature selection and print the report")
    _add_input(sel)
    sel.add_argument("--engine", choices=ENGINES, default=None)
    sel.add_argument("--workers", type=int, default=None)
    _add_engine(sel)
    sel.add_argument("--no-locally-predictive", dest="locally_predictive", action="store_false")
    sel.add_argument("--max-fails", type=int, default=None)
    sel.add_argument("--discrete", action="store_true", help="input is already integer coded")
    sel.add_argument("--trace", default=None, help="write the search trace (TSV) here")
    sel.add_argument("--cache-dump", default=None, help="write every computed correlation (CSV) here")
    sel.add_argument("--timings", action="store_true", help="include wall times in the report")
    sel.add_argument("--output", choices=("json", "text"), default="json")
    sel.set_defaults(func=cmd_select)

    bench = sub.add_parser("bench", help="time engines across worker counts and dataset sizes")
    _add_input(bench, required=False)
    bench.add_argument("--synthetic", default=None, metavar="ROWS,FEATURES",
                       help="benchmark a generated dataset instead of --input")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--discrete", action="store_true")
    bench.add_argument("--engines", default="horizontal,vertical")
    bench.add_argument("--workers", default="1,2,4")
    bench.add_argument("--fractions", default="1.0")
    bench.add_argument("--repeat", type=int, default=3)
    bench.add_argument("--baseline-workers", type=int, default=1)
    bench.add_argument("--scale-features", action="store_true",
                       help="fractions scale the feature count instead of the row count")
    _add_engine(bench)
    bench.add_argument("--output", default=None, help="CSV path (default stdout)")
    bench.set_defaults(func=cmd_bench)

    disc = sub.add_parser("discretize", help="write an integer-coded CSV and its sidecar")
    _add_input(disc)
    disc.add_argument("--output", required=True)
    disc.set_defaults(func=cmd_discretize)

    gen = sub.add_parser("generate", help="write a synthetic integer-coded dataset")
    gen.add_argument("--rows", type=int, required=True)
    gen.add_argument("--features", type=int, required=True)
    gen.add_argument("--relevant", type=int, default=1)
    gen.add_argument("--redundant", type=int, default=0)
    gen.add_argument("--arity", type=int, default=3)
    gen.add_argument("--class-arity", type=int, default=2)
    gen.add_argument("--noise", type=float, default=0.2)
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--output", required=True)
    gen.set_defaults(func=cmd_generate)
    return parser


def cmd_select(args) -> int:
    engine = EngineConfig.from_env(
        layout=args.engine, workers=args.workers, partitions=args.partitions, backend=args.backend
    )
    search = SearchConfig.from_env(max_fails=args.max_fails, locally_predictive=args.locally_predictive)
    state = run_selection(
        input_path=args.input,
        class_column=args.class_column,
        engine=engine,
        search=search,
        header=args.header,
        discrete=args.discrete,
        with_timings=args.timings,
        trace_path=args.trace,
        cache_dump=args.cache_dump,
    )
    report = state["report"]
    sys.stdout.write((report.to_json() if args.output == "json" else report.to_text()) + "\n")
    return EXIT_OK


def _bench_dataset(args):
    if args.synthetic:
        try:
            shape = parse_int_list(args.synthetic)
        except ValueError:
            shape = []
        if len(shape) != 2:
            raise ConfigError(f"--synthetic expects ROWS,FEATURES, got {args.synthetic!r}")
        rows, features = shape
        relevant = min(2, features)
        try:
            return generate_synthetic(rows, features, relevant=relevant,
                                      redundant=min(1, features - relevant), seed=args.seed)
        except DataError as e:
            raise ConfigError(str(e)) from None
    if not args.input or args.class_column is None:
        raise ConfigError("bench needs --input and --class, or --synthetic ROWS,FEATURES")
    if args.discrete:
        return load_discrete_csv(args.input, args.class_column, args.header)
    ds, _ = discretize_mdl(load_csv(args.input, args.class_column, args.header))
    return ds


def cmd_bench(args) -> int:
    try:
        engines = [e.strip() for e in args.engines.split(",") if e.strip()]
        workers = parse_int_list(args.workers)
        fractions = parse_float_list(args.fractions)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    unknown = [e for e in engines if e not in ENGINES]
    if unknown or not engines:
        raise ConfigError(f"--engines must list some of {', '.join(ENGINES)}, got {args.engines!r}")
    if not workers or min(workers) < 1 or args.baseline_workers < 1:
        raise ConfigError("worker counts must be positive integers")
    if not fractions or min(fractions) <= 0:
        raise ConfigError("fractions must be positive")
    if args.repeat < 1:
        raise ConfigError("--repeat must be at least 1")

    ds = _bench_dataset(args)
    report = run_bench(
        ds,
        engines=engines,
        workers=workers,
        fractions=fractions,
        repeat=args.repeat,
        baseline_workers=args.baseline_workers,
        partitions=args.partitions,
        scale_by_features=args.scale_features,
        backend=args.backend or "threads",
        search_cfg=SearchConfig.from_env(),
    )
    logger.info("bench dataset digest %s", report.digest)
    text = report.to_csv(args.output)
    if args.output is None:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_discretize(args) -> int:
    raw = load_csv(args.input, args.class_column, args.header)
    ds, model = discretize_mdl(raw)
    write_discretized(ds, model, args.output)
    return EXIT_OK


def cmd_generate(args) -> int:
    try:
        ds = generate_synthetic(
            args.rows, args.features,
            arity=args.arity, class_arity=args.class_arity,
            relevant=args.relevant, redundant=args.redundant,
            seed=args.seed, noise=args.noise,
        )
    except DataError as e:
        raise ConfigError(str(e)) from None
    write_dataset_csv(ds, args.output)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        configure_logging(args.log_level or log_level())
    except ValueError:
        parser.error(f"unknown log level {args.log_level!r}")
    try:
        return args.func(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    except CfsError as e:
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
