"""Command-line entry point.

Subcommands: gen-landscape, gen-dataset, train, sweep, stats (compare),
plotdata. Default hyperparameters: 10000 training iterations, H=10,
R=1.0, cycle-kind probability 0.5, 20 runs per cell, 1000-example train
and test sets; a bare `nkae sweep` runs the whole default grid. Every run prints the resolved master seed; omitted seeds are
drawn from system entropy so any run can be replayed.

Exit codes: 0 success, 1 user error, 2 I/O error, 3 internal invariant
violation.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys
import traceback
from pathlib import Path

from .errors import ParameterError, InapplicableTestError
from . import experiments, hillclimb, landscape as nkland, networks as nets, stats


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as ParameterError (exit 1)."""

    def error(self, message):
        raise ParameterError(f"{message}\n{self.format_usage()}")


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        seed = secrets.randbits(63)
    if seed < 0:
        raise ParameterError(f"seed must be >= 0, got {seed}")
    print(f"master seed: {seed}")
    return seed


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(v) for v in text.split(",") if v)
    except ValueError:
        raise ParameterError(f"expected a comma-separated integer list, got {text!r}")


def _arch_list(text: str) -> tuple:
    archs = tuple(a.strip() for a in text.split(",") if a.strip())
    for a in archs:
        if a not in nets.ARCHS:
            raise ParameterError(f"unknown architecture {a!r}; choose from {nets.ARCHS}")
    return archs


def _add_train_flags(parser, include_arch=True):
    if include_arch:
        parser.add_argument("--arch", required=True, choices=nets.ARCHS,
                            help="network variant to train")
    parser.add_argument("--iterations", type=int, default=10000,
                        help="training cycles (default: %(default)s)")
    parser.add_argument("--r", type=float, default=1.0, dest="r",
                        help="mutation half-range R (default: %(default)s)")
    parser.add_argument("--h", type=int, default=10, dest="h",
                        help="hidden nodes H (default: %(default)s)")
    parser.add_argument("--p-autoencode", type=float, default=0.5,
                        help="probability of an autoencoding cycle (default: %(default)s)")
    parser.add_argument("--decoder-activation", default="sigmoid",
                        choices=nets.DECODER_ACTIVATIONS,
                        help="decoder node activation (default: %(default)s)")
    parser.add_argument("--decoder-bias", action="store_true",
                        help="give decoder nodes biases (default: off)")
    parser.add_argument("--eval-interval", type=int, default=100,
                        help="snapshot period in cycles (default: %(default)s)")
    parser.add_argument("--no-incremental", action="store_true",
                        help="evaluate objectives from scratch every cycle")


def _train_config(args, seed) -> hillclimb.TrainConfig:
    return hillclimb.TrainConfig(
        seed=seed,
        iterations=args.iterations,
        r=args.r,
        h=args.h,
        p_autoencode=args.p_autoencode,
        decoder_activation=args.decoder_activation,
        decoder_bias=args.decoder_bias,
        eval_interval=args.eval_interval,
        incremental=not args.no_incremental,
    )


def build_parser() -> _Parser:
    parser = _Parser(prog="nkae", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("gen-landscape", parents=[], help="generate a seeded NK landscape",
                       description="Generate a seeded NK landscape and write it as JSON.")
    p.add_argument("--n", type=int, required=True, help="gene count (>= 2)")
    p.add_argument("--k", type=int, required=True, help="epistasis degree (1..min(15, n-1))")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (printed if omitted)")
    p.add_argument("--neighbors", default="random", choices=("random", "adjacent"),
                   help="epistatic partner scheme (default: %(default)s)")
    p.add_argument("--out", required=True, help="output JSON path")

    p = sub.add_parser("gen-dataset", help="sample a labeled dataset from a landscape",
                       description="Sample genomes from a landscape file and write CSV + metadata.")
    p.add_argument("--landscape", required=True, help="landscape JSON path")
    p.add_argument("--count", type=int, default=1000,
                   help="number of examples (default: %(default)s)")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed (printed if omitted)")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("train", help="hill-climb one network on one cell",
                       description="Train one network with the interleaved autoencode/task "
                                   "hill climber (defaults: 10000 iterations, H=10, R=1.0, p=0.5).")
    _add_train_flags(p)
    p.add_argument("--landscape", help="landscape JSON (otherwise generated from --n/--k)")
    p.add_argument("--train-data", help="training CSV (otherwise sampled)")
    p.add_argument("--test-data", help="test CSV (otherwise sampled)")
    p.add_argument("--n", type=int, help="gene count when generating data")
    p.add_argument("--k", type=int, help="epistasis degree when generating data")
    p.add_argument("--neighbors", default="random", choices=("random", "adjacent"))
    p.add_argument("--train-count", type=int, default=1000,
                   help="generated training examples (default: %(default)s)")
    p.add_argument("--test-count", type=int, default=1000,
                   help="generated test examples (default: %(default)s)")
    p.add_argument("--seed", type=int, default=None, help="master seed (printed if omitted)")
    p.add_argument("--out-dir", required=True, help="directory for run artifacts")

    p = sub.add_parser("sweep", help="run the full multi-run experiment grid",
                       description="Sweep (n, k, arch) cells; the default grid covers "
                                   "n in {20,200,1000}, k in {2,5,10,15}, all three "
                                   "architectures, 20 runs per cell.")
    _add_train_flags(p, include_arch=False)
    p.add_argument("--n-grid", type=_int_list, default=(20, 200, 1000),
                   help="comma-separated n values (default: 20,200,1000)")
    p.add_argument("--k-grid", type=_int_list, default=(2, 5, 10, 15),
                   help="comma-separated k values (default: 2,5,10,15)")
    p.add_argument("--archs", type=_arch_list, default=("nan", "ann", "nn"),
                   help="comma-separated architectures (default: nan,ann,nn)")
    p.add_argument("--runs", type=int, default=20,
                   help="independent runs per cell (default: %(default)s)")
    p.add_argument("--train-count", type=int, default=1000,
                   help="training examples per cell (default: %(default)s)")
    p.add_argument("--test-count", type=int, default=1000,
                   help="test examples per cell (default: %(default)s)")
    p.add_argument("--neighbors", default="random", choices=("random", "adjacent"))
    p.add_argument("--fresh-data-per-run", action="store_true",
                   help="sample a new dataset pair for every run instead of per cell")
    p.add_argument("--workers", type=int, default=1,
                   help="parallel trial processes (default: %(default)s)")
    p.add_argument("--seed", type=int, default=None, help="master seed (printed if omitted)")
    p.add_argument("--out-dir", required=True, help="sweep output directory")

    p = sub.add_parser("stats", help="statistical reports over result files",
                       description="Statistical comparison of two result samples.")
    stats_sub = p.add_subparsers(dest="stats_command", metavar="SUBCOMMAND")
    c = stats_sub.add_parser("compare", help="summaries, Shapiro-Wilk, and Welch t-test",
                             description="Compare two samples: summaries, Shapiro-Wilk "
                                         "normality, and a Welch t-test at alpha=0.05.")
    c.add_argument("--a", required=True, help="first sample CSV")
    c.add_argument("--b", required=True, help="second sample CSV")
    c.add_argument("--column", default="final_test_mse",
                   help="column to read from results-style CSVs (default: %(default)s)")
    c.add_argument("--format", default="json", choices=("json", "csv"),
                   help="report format (default: %(default)s)")
    c.add_argument("--out", help="write the report here instead of stdout")

    p = sub.add_parser("plotdata", help="emit figure-style CSV series from a sweep",
                       description="Emit plot-ready CSV series from sweep output.")
    p.add_argument("--results-dir", required=True, help="sweep output directory")
    p.add_argument("--figure", required=True, choices=("fig5", "fig6", "fig7"),
                   help="series style to emit")
    p.add_argument("--n", type=int, help="cell n (fig5/fig7)")
    p.add_argument("--k", type=int, help="cell k (fig5/fig7)")
    p.add_argument("--archs", type=_arch_list, default=None,
                   help="architectures to include (defaults per figure)")

    return parser


def _load_sample(path: str, column: str) -> list:
    """Read a sample vector: a results-style CSV column or one value per line."""
    text = Path(path).read_text(encoding="utf-8").strip()
    if not text:
        raise ParameterError(f"{path} is empty")
    lines = text.split("\n")
    header = lines[0].split(",")
    if column in header:
        idx = header.index(column)
        values = []
        for line in lines[1:]:
            cell = line.split(",")[idx]
            if cell:
                values.append(float(cell))
        return values
    try:
        return [float(line.split(",")[0]) for line in lines]
    except ValueError:
        raise ParameterError(
            f"{path} has no {column!r} column and is not a plain numeric list"
        )


def _cmd_gen_landscape(args) -> int:
    seed = _resolve_seed(args.seed)
    land = nkland.nk_new(args.n, args.k, seed, args.neighbors)
    nkland.save_landscape(land, args.out)
    print(f"wrote {args.out}")
    return 0


def _cmd_gen_dataset(args) -> int:
    land = nkland.load_landscape(args.landscape)
    seed = _resolve_seed(args.seed)
    dataset = nkland.gen_dataset(land, args.count, seed)
    nkland.save_dataset(dataset, args.out)
    print(f"wrote {args.out} ({dataset.count} examples)")
    return 0


def _cmd_train(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.landscape:
        land = nkland.load_landscape(args.landscape)
    elif args.n is not None and args.k is not None:
        land = nkland.nk_new(
            args.n, args.k,
            experiments.derive_seed(seed, experiments.PURPOSE_LANDSCAPE, args.n, args.k),
            args.neighbors,
        )
    else:
        raise ParameterError("provide --landscape or both --n and --k")
    if args.train_data:
        train_set = nkland.load_dataset(args.train_data)
    else:
        train_set = nkland.gen_dataset(
            land, args.train_count,
            experiments.derive_seed(seed, experiments.PURPOSE_TRAIN_DATA, land.n, land.k),
        )
    if args.test_data:
        test_set = nkland.load_dataset(args.test_data)
    else:
        test_set = nkland.gen_dataset(
            land, args.test_count,
            experiments.derive_seed(seed, experiments.PURPOSE_TEST_DATA, land.n, land.k),
        )
    trial_seed = experiments.derive_seed(
        seed, experiments.PURPOSE_TRIAL, land.n, land.k,
        experiments.ARCH_CODES[args.arch], 0,
    )
    config = _train_config(args, trial_seed)
    network, log = hillclimb.train(args.arch, train_set, test_set, config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    base = f"{args.arch}_run00"
    hillclimb.write_cycle_log(log.records, out / f"{base}_cycles.csv")
    hillclimb.write_snapshot_log(log.snapshots, out / f"{base}_snapshots.csv")
    nets.save_network(network, out / f"{base}_network.json")
    print(f"final train task MSE: {log.final_train_task_mse!r}")
    if log.final_test_task_mse is not None:
        print(f"final test task MSE: {log.final_test_task_mse!r}")
    if log.final_ae_mse is not None:
        print(f"final reconstruction MSE: {log.final_ae_mse!r}")
    print(f"wrote run artifacts to {out}")
    return 0


def _cmd_sweep(args) -> int:
    seed = _resolve_seed(args.seed)
    config = experiments.ExperimentConfig(
        master_seed=seed,
        out_dir=Path(args.out_dir),
        n_grid=args.n_grid,
        k_grid=args.k_grid,
        archs=args.archs,
        runs=args.runs,
        train_config=_train_config(args, 0),
        train_count=args.train_count,
        test_count=args.test_count,
        neighbor_mode=args.neighbors,
        fresh_data_per_run=args.fresh_data_per_run,
        workers=args.workers,
    )
    results = experiments.run_experiment(config)
    print(f"completed {len(results)} trials; wrote {config.out_dir / 'results.csv'}")
    return 0


def _cmd_stats(args) -> int:
    if args.stats_command != "compare":
        raise ParameterError("usage: nkae stats compare --a A.csv --b B.csv")
    sample_a = _load_sample(args.a, args.column)
    sample_b = _load_sample(args.b, args.column)
    report = {
        "summary_a": vars(stats.summarize(sample_a)),
        "summary_b": vars(stats.summarize(sample_b)),
    }
    for key, sample in (("shapiro_a", sample_a), ("shapiro_b", sample_b)):
        try:
            report[key] = vars(stats.shapiro_wilk(sample))
        except InapplicableTestError as exc:
            report[key] = {"error": str(exc)}
    try:
        report["t_test"] = vars(stats.welch_t_test(sample_a, sample_b))
    except InapplicableTestError as exc:
        report["t_test"] = {"error": str(exc)}
    if args.format == "json":
        text = json.dumps(report, indent=2)
    else:
        rows = ["section,field,value"]
        for section, body in report.items():
            for field, value in body.items():
                rows.append(f"{section},{field},{value}")
        text = "\n".join(rows)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    else:
        print(text)
    return 0


def _cmd_plotdata(args) -> int:
    path = experiments.emit_series(
        Path(args.results_dir), args.figure, args.n, args.k, args.archs
    )
    print(f"wrote {path}")
    return 0


_COMMANDS = {
    "gen-landscape": _cmd_gen_landscape,
    "gen-dataset": _cmd_gen_dataset,
    "train": _cmd_train,
    "sweep": _cmd_sweep,
    "stats": _cmd_stats,
    "plotdata": _cmd_plotdata,
}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise ParameterError(parser.format_usage())
        return _COMMANDS[args.command](args)
    except SystemExit as exc:  # argparse --help
        return 0 if exc.code in (0, None) else 1
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except Exception:
        traceback.print_exc()
        return 3


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
