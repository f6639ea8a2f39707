"""Multi-run sweeps over (n, k, architecture) and their aggregation.

Every trial is a pure function of the master seed and its cell identity:
per-purpose seeds are derived through `derive_seed`, so any single trial can
be regenerated in isolation (deleting one trial's outputs and re-running the
sweep recomputes only that trial, bit-identically). Within a cell all
architectures share one landscape and one train/test dataset pair, which
removes data variance from the architecture comparison.

Wall-clock durations are inherently not reproducible, so `results.csv`
keeps its `duration_ms` column empty and measured timings go to the
`timings.csv` sidecar; everything else in the output tree is byte-identical
across re-runs and worker counts.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ParameterError, InapplicableTestError
from . import hillclimb, landscape as nkland, networks as nets, stats

ARCH_CODES = {"nan": 1, "ann": 2, "nn": 3}

PURPOSE_LANDSCAPE = 1
PURPOSE_TRAIN_DATA = 2
PURPOSE_TEST_DATA = 3
PURPOSE_TRIAL = 4

RESULTS_HEADER = "n,k,arch,run,seed,final_train_mse,final_test_mse,final_ae_mse,duration_ms"


def derive_seed(master: int, purpose: int, n: int = 0, k: int = 0, arch_code: int = 0, run: int = 0) -> int:
    """Mix (master, purpose, n, k, arch, run) into an independent 64-bit seed."""
    ss = np.random.SeedSequence([int(master), purpose, n, k, arch_code, run])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class ExperimentConfig:
    """A sweep grid plus the training template applied to every trial."""

    master_seed: int
    out_dir: Path
    n_grid: tuple = (20, 200, 1000)
    k_grid: tuple = (2, 5, 10, 15)
    archs: tuple = ("nan", "ann", "nn")
    runs: int = 20
    train_config: hillclimb.TrainConfig = field(default_factory=hillclimb.TrainConfig)
    train_count: int = 1000
    test_count: int = 1000
    neighbor_mode: str = "random"
    fresh_data_per_run: bool = False
    workers: int = 1

    def __post_init__(self):
        self.out_dir = Path(self.out_dir)
        if self.runs < 1:
            raise ParameterError(f"runs must be >= 1, got {self.runs}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if self.master_seed < 0:
            raise ParameterError(f"master seed must be >= 0, got {self.master_seed}")
        for arch in self.archs:
            if arch not in nets.ARCHS:
                raise ParameterError(f"unknown architecture {arch!r}")
        if not self.n_grid or not self.k_grid or not self.archs:
            raise ParameterError("n_grid, k_grid and archs must be non-empty")
        for n, k in itertools.product(self.n_grid, self.k_grid):
            if n < 2 or not 1 <= k <= min(nkland.MAX_K, n - 1):
                raise ParameterError(
                    f"grid cell (n={n}, k={k}) violates 1 <= k <= min({nkland.MAX_K}, n-1)"
                )


@dataclass
class TrialResult:
    n: int
    k: int
    arch: str
    run: int
    seed: int
    final_train_mse: float
    final_test_mse: float
    final_ae_mse: float | None
    duration_ms: float | None = None


@dataclass
class TrialSpec:
    """Everything one trial needs; picklable for the worker pool."""

    n: int
    k: int
    arch: str
    run: int
    landscape_seed: int
    train_seed: int
    test_seed: int
    trial_seed: int
    neighbor_mode: str
    train_count: int
    test_count: int
    train_config: hillclimb.TrainConfig
    cell_dir: str


def _trial_paths(spec: TrialSpec) -> dict:
    base = Path(spec.cell_dir) / f"{spec.arch}_run{spec.run:02d}"
    return {
        "cycles": base.with_name(base.name + "_cycles.csv"),
        "snapshots": base.with_name(base.name + "_snapshots.csv"),
        "network": base.with_name(base.name + "_network.json"),
        "result": base.with_name(base.name + "_result.json"),
    }


def run_trial(spec: TrialSpec) -> TrialResult:
    """Regenerate the trial's data from seeds, train, and write its artifacts."""
    paths = _trial_paths(spec)
    land = nkland.nk_new(spec.n, spec.k, spec.landscape_seed, spec.neighbor_mode)
    train_set = nkland.gen_dataset(land, spec.train_count, spec.train_seed)
    test_set = nkland.gen_dataset(land, spec.test_count, spec.test_seed)
    config = replace(spec.train_config, seed=spec.trial_seed)
    start = time.perf_counter()
    network, log = hillclimb.train(spec.arch, train_set, test_set, config)
    duration_ms = (time.perf_counter() - start) * 1000.0
    Path(spec.cell_dir).mkdir(parents=True, exist_ok=True)
    hillclimb.write_cycle_log(log.records, paths["cycles"])
    hillclimb.write_snapshot_log(log.snapshots, paths["snapshots"])
    nets.save_network(network, paths["network"])
    result = TrialResult(
        spec.n, spec.k, spec.arch, spec.run, spec.trial_seed,
        log.final_train_task_mse, log.final_test_task_mse, log.final_ae_mse,
        duration_ms,
    )
    payload = {
        "n": result.n, "k": result.k, "arch": result.arch, "run": result.run,
        "seed": result.seed,
        "final_train_mse": result.final_train_mse,
        "final_test_mse": result.final_test_mse,
        "final_ae_mse": result.final_ae_mse,
    }
    paths["result"].write_text(json.dumps(payload), encoding="utf-8")
    return result


def _load_trial_result(spec: TrialSpec) -> TrialResult:
    payload = json.loads(_trial_paths(spec)["result"].read_text(encoding="utf-8"))
    return TrialResult(
        payload["n"], payload["k"], payload["arch"], payload["run"], payload["seed"],
        payload["final_train_mse"], payload["final_test_mse"], payload["final_ae_mse"],
        None,
    )


def _trial_complete(spec: TrialSpec) -> bool:
    return all(p.exists() for p in _trial_paths(spec).values())


def build_trial_specs(config: ExperimentConfig) -> list[TrialSpec]:
    specs = []
    master = config.master_seed
    for n, k in itertools.product(config.n_grid, config.k_grid):
        cell_dir = str(config.out_dir / f"n{n}_k{k}")
        landscape_seed = derive_seed(master, PURPOSE_LANDSCAPE, n, k)
        for arch in config.archs:
            code = ARCH_CODES[arch]
            for run in range(config.runs):
                data_run = run if config.fresh_data_per_run else 0
                specs.append(
                    TrialSpec(
                        n, k, arch, run,
                        landscape_seed,
                        derive_seed(master, PURPOSE_TRAIN_DATA, n, k, run=data_run),
                        derive_seed(master, PURPOSE_TEST_DATA, n, k, run=data_run),
                        derive_seed(master, PURPOSE_TRIAL, n, k, code, run),
                        config.neighbor_mode,
                        config.train_count,
                        config.test_count,
                        config.train_config,
                        cell_dir,
                    )
                )
    return specs


def _fmt_opt(value) -> str:
    return "" if value is None else repr(float(value))


def write_results_csv(results, path) -> None:
    """Deterministic results table; duration_ms stays empty by design."""
    rows = sorted(results, key=lambda r: (r.n, r.k, r.arch, r.run))
    lines = [RESULTS_HEADER]
    for r in rows:
        lines.append(
            f"{r.n},{r.k},{r.arch},{r.run},{r.seed},"
            f"{_fmt_opt(r.final_train_mse)},{_fmt_opt(r.final_test_mse)},"
            f"{_fmt_opt(r.final_ae_mse)},"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_results_csv(path) -> list[TrialResult]:
    results = []
    with Path(path).open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != RESULTS_HEADER:
            raise ParameterError(f"unexpected results header: {header!r}")
        for line in fh:
            n, k, arch, run, seed, train_mse, test_mse, ae, dur = line.rstrip("\n").split(",")
            results.append(
                TrialResult(
                    int(n), int(k), arch, int(run), int(seed),
                    float(train_mse), float(test_mse),
                    float(ae) if ae else None,
                    float(dur) if dur else None,
                )
            )
    return results


def run_experiment(config: ExperimentConfig) -> list[TrialResult]:
    """Execute (or resume) every trial in the grid; write results and timings.

    Trials whose four artifact files already exist are loaded, not re-run.
    The results table is a pure function of the config, independent of
    worker count and scheduling.
    """
    config.out_dir.mkdir(parents=True, exist_ok=True)
    specs = build_trial_specs(config)
    pending, results = [], []
    for spec in specs:
        if _trial_complete(spec):
            results.append(_load_trial_result(spec))
        else:
            pending.append(spec)
    if config.workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            results.extend(pool.map(run_trial, pending))
    else:
        results.extend(run_trial(s) for s in pending)
    write_results_csv(results, config.out_dir / "results.csv")
    timed = [r for r in results if r.duration_ms is not None]
    lines = ["n,k,arch,run,duration_ms"]
    for r in sorted(timed, key=lambda r: (r.n, r.k, r.arch, r.run)):
        lines.append(f"{r.n},{r.k},{r.arch},{r.run},{r.duration_ms:.3f}")
    (config.out_dir / "timings.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return sorted(results, key=lambda r: (r.n, r.k, r.arch, r.run))


# --- aggregation ---------------------------------------------------------------

def _report_dict(report: stats.TestReport) -> dict:
    return {
        "statistic": report.statistic,
        "df": report.df,
        "p_value": report.p_value,
        "significant": report.significant,
    }


def aggregate(results, cell: tuple[int, int]) -> dict:
    """Per-architecture summaries plus pairwise t-tests for one grid cell.

    Inapplicable tests (constant samples) are surfaced as an "error" entry
    rather than aborting the report.
    """
    n, k = cell
    rows = [r for r in results if r.n == n and r.k == k]
    if not rows:
        raise ParameterError(f"no results recorded for cell (n={n}, k={k})")
    by_arch: dict[str, list] = {}
    for r in sorted(rows, key=lambda r: r.run):
        by_arch.setdefault(r.arch, []).append(r.final_test_mse)
    report: dict = {"cell": {"n": n, "k": k}, "per_arch": {}, "pairwise": {}}
    for arch, values in sorted(by_arch.items()):
        if len(values) < 2:
            raise ParameterError(
                f"cell (n={n}, k={k}) has {len(values)} {arch} trials; need >= 2"
            )
        entry = {"summary": vars(stats.summarize(values))}
        try:
            entry["shapiro"] = _report_dict(stats.shapiro_wilk(values))
        except InapplicableTestError as exc:
            entry["shapiro"] = {"error": str(exc)}
        report["per_arch"][arch] = entry
    for a, b in itertools.combinations(sorted(by_arch), 2):
        try:
            report["pairwise"][f"{a}_vs_{b}"] = _report_dict(
                stats.welch_t_test(by_arch[a], by_arch[b])
            )
        except InapplicableTestError as exc:
            report["pairwise"][f"{a}_vs_{b}"] = {
                "error": str(exc),
                "note": "t-test skipped: samples are degenerate",
            }
    return report


# --- figure data -----------------------------------------------------------------

def _cell_snapshot_series(out_dir, results, n, k, arch):
    """Stack snapshot logs for every run of (n, k, arch); returns (iters, rows)."""
    runs = sorted(r.run for r in results if r.n == n and r.k == k and r.arch == arch)
    if not runs:
        raise FileNotFoundError(f"no runs recorded for n={n}, k={k}, arch={arch}")
    all_snaps = []
    for run in runs:
        path = Path(out_dir) / f"n{n}_k{k}" / f"{arch}_run{run:02d}_snapshots.csv"
        all_snaps.append(hillclimb.read_snapshot_log(path))
    iters = [s.iteration for s in all_snaps[0]]
    for snaps in all_snaps:
        if [s.iteration for s in snaps] != iters:
            raise ParameterError("snapshot logs disagree on iteration grid")
    return iters, all_snaps


def _mean_over_runs(all_snaps, attr):
    columns = []
    for snaps in all_snaps:
        vals = [getattr(s, attr) for s in snaps]
        if any(v is None for v in vals):
            return None
        columns.append(vals)
    return np.mean(np.asarray(columns), axis=0)


def emit_fig5_series(out_dir, n, k, archs=("nan", "ann")) -> Path:
    """Mean train task MSE and mean reconstruction MSE per snapshot iteration."""
    out_dir = Path(out_dir)
    results = load_results_csv(out_dir / "results.csv")
    lines = ["iter,arch,mean_train_task_mse,mean_train_ae_mse"]
    for arch in archs:
        iters, snaps = _cell_snapshot_series(out_dir, results, n, k, arch)
        task = _mean_over_runs(snaps, "train_task_mse")
        ae = _mean_over_runs(snaps, "train_ae_mse")
        for idx, it in enumerate(iters):
            ae_cell = "" if ae is None else repr(float(ae[idx]))
            lines.append(f"{it},{arch},{repr(float(task[idx]))},{ae_cell}")
    path = out_dir / f"fig5_n{n}_k{k}.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def emit_fig6_series(out_dir) -> Path:
    """Mean/min/max final test MSE for every (n, k, arch) in the results table."""
    out_dir = Path(out_dir)
    results = load_results_csv(out_dir / "results.csv")
    cells: dict[tuple, list] = {}
    for r in results:
        cells.setdefault((r.n, r.k, r.arch), []).append(r.final_test_mse)
    lines = ["n,k,arch,mean_test_mse,min_test_mse,max_test_mse"]
    for (n, k, arch), values in sorted(cells.items()):
        s = stats.summarize(values)
        lines.append(f"{n},{k},{arch},{s.mean!r},{s.min!r},{s.max!r}")
    path = out_dir / "fig6.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def emit_fig7_series(out_dir, n, k, archs=("nan", "nn")) -> Path:
    """Mean test task MSE per snapshot iteration for the chosen cell."""
    out_dir = Path(out_dir)
    results = load_results_csv(out_dir / "results.csv")
    lines = ["iter,arch,mean_test_task_mse"]
    for arch in archs:
        iters, snaps = _cell_snapshot_series(out_dir, results, n, k, arch)
        test = _mean_over_runs(snaps, "test_task_mse")
        if test is None:
            raise ParameterError(f"runs for arch {arch!r} carry no test-set snapshots")
        for idx, it in enumerate(iters):
            lines.append(f"{it},{arch},{repr(float(test[idx]))}")
    path = out_dir / f"fig7_n{n}_k{k}.csv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def emit_series(out_dir, figure: str, n: int | None = None, k: int | None = None, archs=None) -> Path:
    """Dispatch to the figure-style emitters by tag: fig5, fig6 or fig7."""
    if figure == "fig6":
        return emit_fig6_series(out_dir)
    if figure in ("fig5", "fig7"):
        if n is None or k is None:
            raise ParameterError(f"{figure} requires both n and k")
        if figure == "fig5":
            return emit_fig5_series(out_dir, n, k, archs or ("nan", "ann"))
        return emit_fig7_series(out_dir, n, k, archs or ("nan", "nn"))
    raise ParameterError(f"unknown figure tag {figure!r}; expected fig5, fig6 or fig7")
