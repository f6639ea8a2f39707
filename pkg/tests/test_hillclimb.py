from collections import Counter

import numpy as np
import pytest

from nkae import Dataset, EvalCache, ParameterError, TrainConfig, init_network
from nkae import gen_dataset, nk_new
from nkae import networks as nets
from nkae.hillclimb import (
    CYCLE_HEADER,
    SNAPSHOT_HEADER,
    choose_cycle,
    pick_coordinate,
    propose_and_test,
    read_cycle_log,
    read_snapshot_log,
    train,
    write_cycle_log,
    write_snapshot_log,
)

from oracles import monotonicity_violations, replay_final_network


class StubRng:
    """Minimal rng double: fixed delta, scripted tie-break draws."""

    def __init__(self, uniform_value, random_values=()):
        self._uniform = uniform_value
        self._random = list(random_values)

    def uniform(self, lo, hi):
        return self._uniform

    def random(self):
        return self._random.pop(0)


def make_dataset(n, count, seed):
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(count, n))
    return Dataset(bits * 2.0 - 1.0, rng.random(count))


def make_cell(n=10, k=3, count=60, seed=5):
    land = nk_new(n, k, seed)
    return gen_dataset(land, count, seed + 1), gen_dataset(land, count, seed + 2)


# --- config -------------------------------------------------------------------

@pytest.mark.parametrize(
    "kwargs",
    [
        {"iterations": 0},
        {"r": 0.0},
        {"r": -1.0},
        {"h": 0},
        {"p_autoencode": -0.1},
        {"p_autoencode": 1.5},
        {"eval_interval": 0},
        {"decoder_activation": "relu"},
    ],
)
def test_config_validation(kwargs):
    with pytest.raises(ParameterError):
        TrainConfig(seed=0, **kwargs)


def test_config_default_values():
    config = TrainConfig(seed=0)
    assert (config.iterations, config.r, config.h) == (10000, 1.0, 10)
    assert config.p_autoencode == 0.5
    assert config.eval_interval == 100


# --- cycle choice -----------------------------------------------------------------

def test_choose_cycle_degenerate_probabilities():
    rng = np.random.default_rng(0)
    always_task = TrainConfig(seed=0, p_autoencode=0.0)
    always_ae = TrainConfig(seed=0, p_autoencode=1.0)
    assert all(choose_cycle(rng, always_task) == "task" for _ in range(200))
    assert all(choose_cycle(rng, always_ae) == "autoencode" for _ in range(200))


def test_choose_cycle_balanced_fraction():
    rng = np.random.default_rng(0)
    config = TrainConfig(seed=0, p_autoencode=0.5)
    hits = sum(choose_cycle(rng, config) == "autoencode" for _ in range(10000))
    assert 0.45 <= hits / 10000 <= 0.55


# --- coordinate picking ---------------------------------------------------------------

def test_task_pool_is_output_node():
    net = init_network("nn", 20, TrainConfig(seed=0, h=10), np.random.default_rng(1))
    rng = np.random.default_rng(2)
    seen = {pick_coordinate(net, "task", rng) for _ in range(2000)}
    assert len(seen) == 11
    assert all(c.layer in ("output_w", "output_bias") for c in seen)


def test_nan_autoencode_pool_size():
    net = init_network("nan", 20, TrainConfig(seed=0, h=10), np.random.default_rng(1))
    assert nets.autoencode_coord_count(net) == 410
    covered = {nets.autoencode_coord(net, u) for u in range(410)}
    assert len(covered) == 410
    layers = Counter(c.layer for c in covered)
    assert layers == {"encoder": 200, "hidden_bias": 10, "decoder": 200}


def test_ann_autoencode_pool_size_with_bias():
    net = init_network(
        "ann", 6, TrainConfig(seed=0, h=4, decoder_bias=True), np.random.default_rng(1)
    )
    assert nets.autoencode_coord_count(net) == 6 * 4 + 4 + 4 * 6 + 6


def test_pick_coordinate_empirical_uniformity():
    # frozen seed: every count within 3 sigma of the multinomial expectation
    config = TrainConfig(seed=0, h=10)
    nn = init_network("nn", 20, config, np.random.default_rng(1))
    nan = init_network("nan", 20, config, np.random.default_rng(1))
    for net, kind, pool in ((nn, "task", 11), (nan, "autoencode", 410)):
        rng = np.random.default_rng(2)
        draws = 100_000
        counts = Counter(pick_coordinate(net, kind, rng) for _ in range(draws))
        assert len(counts) == pool
        p = 1.0 / pool
        sigma = (draws * p * (1 - p)) ** 0.5
        assert max(abs(c - draws * p) for c in counts.values()) <= 3 * sigma


# --- propose_and_test -------------------------------------------------------------------

def monotone_setup(cache_mode):
    """One example, target 1, output weight 0: error is monotone in output_bias."""
    net = init_network("nn", 1, TrainConfig(seed=0, h=1), np.random.default_rng(3))
    net.output_w[0] = 0.0
    ds = Dataset(np.array([[1.0]]), np.array([1.0]))
    cache = EvalCache(net, ds) if cache_mode else None
    return net, ds, cache


@pytest.mark.parametrize("cache_mode", [False, True])
def test_improving_mutation_accepted(cache_mode):
    seed = 4  # first uniform(-1, 1) draw is positive
    probe = np.random.default_rng(seed)
    delta = float(probe.uniform(-1.0, 1.0))
    assert delta > 0
    net, ds, cache = monotone_setup(cache_mode)
    coord = nets.Coord("output_bias", 0, 0)
    accepted, rec = propose_and_test(
        net, coord, ds, np.random.default_rng(seed), TrainConfig(seed=0, h=1), cache=cache
    )
    assert accepted and rec.accepted
    assert rec.delta == delta
    assert rec.objective_after < rec.objective_before
    assert net.output_bias == pytest.approx(rec.delta, abs=2.0)


@pytest.mark.parametrize("cache_mode", [False, True])
def test_worsening_mutation_reverted_exactly(cache_mode):
    seed = 2  # first uniform(-1, 1) draw is negative
    probe = np.random.default_rng(seed)
    assert float(probe.uniform(-1.0, 1.0)) < 0
    net, ds, cache = monotone_setup(cache_mode)
    before = net.copy()
    coord = nets.Coord("output_bias", 0, 0)
    accepted, rec = propose_and_test(
        net, coord, ds, np.random.default_rng(seed), TrainConfig(seed=0, h=1), cache=cache
    )
    assert not accepted and not rec.accepted
    assert rec.objective_after > rec.objective_before
    assert nets.networks_equal(net, before)


@pytest.mark.parametrize("tie_draw,expect", [(0.3, True), (0.7, False)])
def test_zero_delta_tie_broken_at_random(tie_draw, expect):
    net, ds, _ = monotone_setup(cache_mode=False)
    before = net.copy()
    coord = nets.Coord("output_bias", 0, 0)
    accepted, rec = propose_and_test(
        net, coord, ds, StubRng(0.0, [tie_draw]), TrainConfig(seed=0, h=1)
    )
    assert accepted is expect
    assert rec.delta == 0.0
    assert rec.objective_after == rec.objective_before
    assert nets.networks_equal(net, before)  # delta 0 leaves values unchanged either way


def test_kind_recorded_from_coordinate():
    net, ds, _ = monotone_setup(cache_mode=False)
    _, rec = propose_and_test(
        net, nets.Coord("encoder", 0, 0), ds, np.random.default_rng(1), TrainConfig(seed=0, h=1)
    )
    assert rec.kind == "autoencode"
    _, rec = propose_and_test(
        net, nets.Coord("output_w", 0, 0), ds, np.random.default_rng(1), TrainConfig(seed=0, h=1)
    )
    assert rec.kind == "task"


# --- train ------------------------------------------------------------------------------

def test_single_iteration_run():
    train_set, _ = make_cell()
    config = TrainConfig(seed=1, iterations=1, h=3)
    _, log = train("nn", train_set, None, config)
    assert len(log.records) == 1
    assert log.records[0].iteration == 1


def test_snapshot_cadence_exact():
    train_set, test_set = make_cell()
    config = TrainConfig(seed=2, iterations=430, h=3, eval_interval=100)
    _, log = train("nan", train_set, test_set, config)
    assert [s.iteration for s in log.snapshots] == [100, 200, 300, 400]
    assert all(s.test_task_mse is not None for s in log.snapshots)


def test_snapshot_fields_for_plain_network_and_missing_test_set():
    train_set, _ = make_cell()
    config = TrainConfig(seed=3, iterations=100, h=3, eval_interval=50)
    _, log = train("nn", train_set, None, config)
    assert all(s.train_ae_mse is None for s in log.snapshots)
    assert all(s.test_task_mse is None for s in log.snapshots)


def test_train_deterministic_in_seed():
    train_set, test_set = make_cell()
    config = TrainConfig(seed=9, iterations=300, h=3)
    net_a, log_a = train("ann", train_set, test_set, config)
    net_b, log_b = train("ann", train_set, test_set, config)
    assert nets.networks_equal(net_a, net_b)
    assert log_a.records == log_b.records
    assert log_a.snapshots == log_b.snapshots


def test_train_rejects_mismatched_sets():
    train_set, _ = make_cell(n=10)
    other, _ = make_cell(n=8)
    with pytest.raises(ParameterError):
        train("nn", train_set, other, TrainConfig(seed=0, h=2))


def test_incremental_and_naive_modes_agree():
    train_set, _ = make_cell(count=40)
    fast = TrainConfig(seed=12, iterations=250, h=3, incremental=True)
    slow = TrainConfig(seed=12, iterations=250, h=3, incremental=False)
    for arch in ("nan", "ann", "nn"):
        _, log_fast = train(arch, train_set, None, fast)
        _, log_slow = train(arch, train_set, None, slow)
        for a, b in zip(log_fast.records, log_slow.records):
            assert a.accepted == b.accepted
            assert a.coord == b.coord and a.delta == b.delta
            assert abs(a.objective_after - b.objective_after) < 1e-12


@pytest.mark.parametrize("arch", ["nn", "nan", "ann"])
def test_short_run_objective_streams_monotone(arch):
    train_set, test_set = make_cell()
    config = TrainConfig(seed=21, iterations=600, h=3)
    _, log = train(arch, train_set, test_set, config)
    assert monotonicity_violations(arch, log.records) == []


@pytest.mark.parametrize("arch", ["nn", "nan", "ann"])
def test_final_network_replays_from_accepted_deltas(arch):
    train_set, _ = make_cell()
    config = TrainConfig(seed=22, iterations=400, h=3)
    _, log = train(arch, train_set, None, config)
    replayed = replay_final_network(arch, train_set.n, config, log.records)
    assert nets.networks_equal(replayed, log.final_network)


def test_final_snapshot_matches_final_network():
    train_set, test_set = make_cell()
    config = TrainConfig(seed=23, iterations=200, h=3, eval_interval=100)
    net, log = train("nan", train_set, test_set, config)
    last = log.snapshots[-1]
    assert last.iteration == 200
    assert last.train_task_mse == nets.task_mse(net, train_set)
    assert last.train_ae_mse == nets.nan_mean_ae_mse(net, train_set)
    assert log.final_train_task_mse == last.train_task_mse


# --- log files --------------------------------------------------------------------------

def test_cycle_log_roundtrip(tmp_path):
    train_set, _ = make_cell()
    config = TrainConfig(seed=31, iterations=120, h=3)
    _, log = train("nan", train_set, None, config)
    path = tmp_path / "cycles.csv"
    write_cycle_log(log.records, path)
    assert path.read_text().splitlines()[0] == CYCLE_HEADER
    assert read_cycle_log(path) == log.records


def test_snapshot_log_roundtrip(tmp_path):
    train_set, test_set = make_cell()
    config = TrainConfig(seed=32, iterations=200, h=3, eval_interval=50)
    _, log = train("nn", train_set, test_set, config)
    path = tmp_path / "snaps.csv"
    write_snapshot_log(log.snapshots, path)
    lines = path.read_text().splitlines()
    assert lines[0] == SNAPSHOT_HEADER
    # nn has no reconstruction objective: the ae field stays empty
    assert all(line.split(",")[2] == "" for line in lines[1:])
    assert read_snapshot_log(path) == log.snapshots
