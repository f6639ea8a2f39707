"""Interleaved autoencode/task random hill climbing.

Each cycle: pick a cycle kind (autoencode with probability `p_autoencode`),
pick one coordinate uniformly from that kind's pool (task cycles draw from
the output node's weights and bias; autoencode cycles from everything
attached to the hidden layer, decoders included), add a uniform delta from
[-r, +r], and keep the change only if the cycle's objective does not get
worse (strict improvement accepts; an exact tie accepts with probability
0.5; anything else reverts exactly).

Objectives per cycle kind: task cycles score supervised MSE for every
architecture. Autoencode cycles score the owning neuron's reconstruction
MSE (nan), the decoder layer's reconstruction MSE (ann), or — lacking any
decoder — supervised MSE again (nn), which preserves the per-layer mutation
budget for a fair comparison.

A run is a pure function of its config seed. The RNG stream is consumed in
a fixed order: network init, then per cycle one `random()` for the kind,
one `integers()` for the coordinate, one `uniform()` for the delta, and one
`random()` only when a tie must be broken.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .incremental import EvalCache
from .landscape import Dataset
from . import networks as nets
from .networks import Coord, parse_coord

TASK_LAYERS = ("output_w", "output_bias")
KIND_AUTOENCODE = "autoencode"
KIND_TASK = "task"


@dataclass
class TrainConfig:
    """Hill-climber hyperparameters (defaults: 10000 cycles, H=10, R=1.0)."""

    seed: int = 0
    iterations: int = 10000
    r: float = 1.0
    h: int = 10
    p_autoencode: float = 0.5
    decoder_activation: str = "sigmoid"
    decoder_bias: bool = False
    eval_interval: int = 100
    incremental: bool = True

    def __post_init__(self):
        if self.iterations < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}")
        if not self.r > 0:
            raise ParameterError(f"r must be > 0, got {self.r}")
        if self.h < 1:
            raise ParameterError(f"h must be >= 1, got {self.h}")
        if not 0.0 <= self.p_autoencode <= 1.0:
            raise ParameterError(f"p_autoencode must lie in [0, 1], got {self.p_autoencode}")
        if self.eval_interval < 1:
            raise ParameterError(f"eval_interval must be >= 1, got {self.eval_interval}")
        if self.decoder_activation not in nets.DECODER_ACTIVATIONS:
            raise ParameterError(
                f"decoder_activation must be one of {nets.DECODER_ACTIVATIONS}, "
                f"got {self.decoder_activation!r}"
            )


@dataclass
class CycleRecord:
    iteration: int
    kind: str
    coord: Coord
    delta: float
    objective_before: float
    objective_after: float
    accepted: bool


@dataclass
class Snapshot:
    iteration: int
    train_task_mse: float
    train_ae_mse: float | None
    test_task_mse: float | None


@dataclass
class RunLog:
    """Complete, replayable trace of one training run."""

    arch: str
    config: TrainConfig
    records: list[CycleRecord] = field(default_factory=list)
    snapshots: list[Snapshot] = field(default_factory=list)
    final_network: object = None
    final_train_task_mse: float = 0.0
    final_test_task_mse: float | None = None
    final_ae_mse: float | None = None


def choose_cycle(rng: np.random.Generator, config: TrainConfig, arch: str | None = None) -> str:
    """Autoencode with probability p_autoencode, else task (one draw)."""
    return KIND_AUTOENCODE if rng.random() < config.p_autoencode else KIND_TASK


def pick_coordinate(network, kind: str, rng: np.random.Generator) -> Coord:
    """Uniform draw over the cycle kind's coordinate pool."""
    if kind == KIND_TASK:
        return nets.task_coord(network, int(rng.integers(nets.task_coord_count(network))))
    if kind == KIND_AUTOENCODE:
        return nets.autoencode_coord(
            network, int(rng.integers(nets.autoencode_coord_count(network)))
        )
    raise ParameterError(f"unknown cycle kind {kind!r}")


def _naive_objective(network, coord, dataset):
    if coord.layer in TASK_LAYERS or network.arch == "nn":
        return nets.task_mse(network, dataset)
    if network.arch == "nan":
        return nets.neuron_ae_mse(network, coord.row, dataset)
    return nets.layer_ae_mse(network, dataset)


def propose_and_test(
    network,
    coord: Coord,
    train_set: Dataset,
    rng: np.random.Generator,
    config: TrainConfig,
    *,
    cache: EvalCache | None = None,
    iteration: int = 0,
) -> tuple[bool, CycleRecord]:
    """Mutate one coordinate by a uniform delta; keep it only if not worse.

    Accepts iff the cycle objective strictly improves; exact ties accept
    with probability 0.5 (one extra draw); otherwise the incumbent is
    restored bit-for-bit.
    """
    delta = float(rng.uniform(-config.r, config.r))
    kind = KIND_TASK if coord.layer in TASK_LAYERS else KIND_AUTOENCODE
    if cache is not None:
        before = cache.objective_for(coord)
        after = cache.propose(coord, delta)
    else:
        before = _naive_objective(network, coord, train_set)
        old = nets.get_coord(network, coord)
        nets.set_coord(network, coord, old + delta)
        after = _naive_objective(network, coord, train_set)
    if after < before:
        accepted = True
    elif after == before:
        accepted = bool(rng.random() < 0.5)
    else:
        accepted = False
    if cache is not None:
        if accepted:
            cache.accept()
        else:
            cache.reject()
    elif not accepted:
        nets.set_coord(network, coord, old)
    return accepted, CycleRecord(iteration, kind, coord, delta, before, after, accepted)


def _snapshot(network, train_set, test_set, iteration):
    return Snapshot(
        iteration,
        nets.task_mse(network, train_set),
        nets.ae_mse(network, train_set),
        None if test_set is None else nets.task_mse(network, test_set),
    )


def train(
    arch: str,
    train_set: Dataset,
    test_set: Dataset | None,
    config: TrainConfig,
) -> tuple[object, RunLog]:
    """Run the full hill climb; returns the incumbent network and its log.

    Snapshot MSEs are recomputed from scratch every `eval_interval` cycles
    (they double as a cache audit); per-cycle objectives come from the
    incremental cache unless `config.incremental` is off.
    """
    if arch not in nets.ARCHS:
        raise ParameterError(f"arch must be one of {nets.ARCHS}, got {arch!r}")
    if train_set.count == 0:
        raise ParameterError("training set must contain at least one example")
    if test_set is not None and test_set.n != train_set.n:
        raise ParameterError(
            f"train and test sets must share input width, got {train_set.n} and {test_set.n}"
        )
    rng = np.random.default_rng(config.seed)
    network = nets.init_network(arch, train_set.n, config, rng)
    cache = EvalCache(network, train_set) if config.incremental else None
    log = RunLog(arch, config)
    records = log.records
    for iteration in range(1, config.iterations + 1):
        kind = choose_cycle(rng, config, arch)
        coord = pick_coordinate(network, kind, rng)
        _, record = propose_and_test(
            network, coord, train_set, rng, config, cache=cache, iteration=iteration
        )
        records.append(record)
        if iteration % config.eval_interval == 0:
            log.snapshots.append(_snapshot(network, train_set, test_set, iteration))
    log.final_network = network.copy()
    log.final_train_task_mse = nets.task_mse(network, train_set)
    log.final_ae_mse = nets.ae_mse(network, train_set)
    if test_set is not None:
        log.final_test_task_mse = nets.task_mse(network, test_set)
    return network, log


# --- log serialization ------------------------------------------------------

CYCLE_HEADER = "iter,kind,coord,delta,obj_before,obj_after,accepted"
SNAPSHOT_HEADER = "iter,train_task_mse,train_ae_mse,test_task_mse"


def _fmt(value) -> str:
    return "" if value is None else repr(float(value))


def write_cycle_log(records, path) -> None:
    lines = [CYCLE_HEADER]
    for r in records:
        lines.append(
            f"{r.iteration},{r.kind},{r.coord},{_fmt(r.delta)},"
            f"{_fmt(r.objective_before)},{_fmt(r.objective_after)},{int(r.accepted)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_cycle_log(path) -> list[CycleRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CYCLE_HEADER:
            raise ParameterError(f"unexpected cycle log header: {header!r}")
        for line in fh:
            it, kind, coord, delta, before, after, accepted = line.strip().split(",")
            records.append(
                CycleRecord(
                    int(it), kind, parse_coord(coord), float(delta),
                    float(before), float(after), accepted == "1",
                )
            )
    return records


def write_snapshot_log(snapshots, path) -> None:
    lines = [SNAPSHOT_HEADER]
    for s in snapshots:
        lines.append(
            f"{s.iteration},{_fmt(s.train_task_mse)},{_fmt(s.train_ae_mse)},{_fmt(s.test_task_mse)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_snapshot_log(path) -> list[Snapshot]:
    snapshots = []
    with Path(path).open(encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != SNAPSHOT_HEADER:
            raise ParameterError(f"unexpected snapshot log header: {header!r}")
        for line in fh:
            it, train_mse, ae, test = line.rstrip("\n").split(",")
            snapshots.append(
                Snapshot(
                    int(it),
                    float(train_mse),
                    float(ae) if ae else None,
                    float(test) if test else None,
                )
            )
    return snapshots
