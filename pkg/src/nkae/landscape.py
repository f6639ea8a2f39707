"""Seeded NK fitness landscapes and regression datasets sampled from them.

An NK landscape assigns each of ``n`` binary genes a lookup table of
``2**(k+1)`` uniform-random contribution values; a genome's fitness is the
mean of its per-gene table lookups. The lookup index for gene ``i`` is built
with gene ``i``'s own bit as the most significant bit, followed by the bits
of its ``k`` epistatic neighbors in stored order. Contributions are summed
in gene order (left to right, float64) so results are identical between the
single-genome and batch paths and reproducible bit-for-bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError

MAX_K = 15


class NkLandscape:
    """A seeded NK landscape: epistasis structure plus fitness tables.

    Attributes:
        n: number of genes.
        k: epistasis degree (neighbors per gene).
        seed: 64-bit seed the structure was generated from.
        neighbors: (n, k) int array; row i holds gene i's epistatic partners.
        tables: (n, 2**(k+1)) float64 array of unit-interval contributions.
        neighbor_mode: "random" or "adjacent".
    """

    def __init__(self, n, k, seed, neighbors, tables, neighbor_mode="random"):
        self.n = int(n)
        self.k = int(k)
        self.seed = int(seed)
        self.neighbors = np.asarray(neighbors, dtype=np.int64)
        self.tables = np.asarray(tables, dtype=np.float64)
        self.neighbor_mode = neighbor_mode
        self._validate()
        # own gene index first, then neighbors: one gather per evaluation
        self._lookup_cols = np.concatenate(
            [np.arange(self.n, dtype=np.int64)[:, None], self.neighbors], axis=1
        )
        self._rows = np.arange(self.n)

    def _validate(self):
        n, k = self.n, self.k
        if n < 2:
            raise ParameterError(f"n must be >= 2, got {n}")
        if not 1 <= k <= min(MAX_K, n - 1):
            raise ParameterError(
                f"k must satisfy 1 <= k <= min({MAX_K}, n-1) = {min(MAX_K, n - 1)}, got {k}"
            )
        if self.neighbors.shape != (n, k):
            raise ParameterError(f"neighbors must have shape ({n}, {k})")
        if self.tables.shape != (n, 2 ** (k + 1)):
            raise ParameterError(f"tables must have shape ({n}, {2 ** (k + 1)})")
        for i in range(n):
            row = self.neighbors[i]
            if len(set(row.tolist())) != k or i in row or row.min() < 0 or row.max() >= n:
                raise ParameterError(f"neighbors[{i}] must be {k} distinct indices != {i} in [0, {n})")
        if self.tables.min() < 0.0 or self.tables.max() > 1.0:
            raise ParameterError("table entries must lie in [0.0, 1.0]")

    def __eq__(self, other):
        if not isinstance(other, NkLandscape):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and self.seed == other.seed
            and self.neighbor_mode == other.neighbor_mode
            and np.array_equal(self.neighbors, other.neighbors)
            and np.array_equal(self.tables, other.tables)
        )

    def __repr__(self):
        return f"NkLandscape(n={self.n}, k={self.k}, seed={self.seed}, neighbor_mode={self.neighbor_mode!r})"


@dataclass
class Dataset:
    """Sampled regression examples: ±1-encoded genomes and their fitnesses."""

    inputs: np.ndarray          # (count, n) float64, entries exactly -1.0 or +1.0
    targets: np.ndarray         # (count,) float64 in [0, 1]
    meta: dict = field(default_factory=dict)

    @property
    def count(self):
        return self.inputs.shape[0]

    @property
    def n(self):
        return self.inputs.shape[1]


def nk_new(n: int, k: int, seed: int, neighbor_mode: str = "random") -> NkLandscape:
    """Construct a seeded landscape; deterministic in (n, k, seed, neighbor_mode).

    Neighbor rows are drawn gene by gene (uniform without replacement, or the
    next k indices cyclically for "adjacent"), then all table entries in one
    uniform [0, 1) draw.
    """
    if n < 2:
        raise ParameterError(f"n must be >= 2, got {n}")
    if not 1 <= k <= min(MAX_K, n - 1):
        raise ParameterError(
            f"k must satisfy 1 <= k <= min({MAX_K}, n-1) = {min(MAX_K, n - 1)}, got {k}"
        )
    if neighbor_mode not in ("random", "adjacent"):
        raise ParameterError(f"neighbor_mode must be 'random' or 'adjacent', got {neighbor_mode!r}")
    rng = np.random.default_rng(seed)
    neighbors = np.empty((n, k), dtype=np.int64)
    if neighbor_mode == "adjacent":
        for i in range(n):
            neighbors[i] = [(i + j + 1) % n for j in range(k)]
    else:
        for i in range(n):
            candidates = np.delete(np.arange(n, dtype=np.int64), i)
            neighbors[i] = rng.choice(candidates, size=k, replace=False)
    tables = rng.random((n, 2 ** (k + 1)))
    return NkLandscape(n, k, seed, neighbors, tables, neighbor_mode)


def _check_genomes(landscape, genomes):
    genomes = np.asarray(genomes)
    if genomes.ndim != 2 or genomes.shape[1] != landscape.n:
        raise ParameterError(
            f"genomes must have {landscape.n} genes, got shape {genomes.shape}"
        )
    if not np.isin(genomes, (0, 1)).all():
        raise ParameterError("genome entries must be 0 or 1")
    return genomes.astype(np.uint8, copy=False)


def gene_contribution(landscape: NkLandscape, i: int, genome) -> float:
    """Table lookup for gene i: own bit is the most significant index bit."""
    if not 0 <= i < landscape.n:
        raise ParameterError(f"gene index must lie in [0, {landscape.n}), got {i}")
    genome = _check_genomes(landscape, np.asarray(genome)[None, :])[0]
    idx = int(genome[i])
    for nb in landscape.neighbors[i]:
        idx = (idx << 1) | int(genome[nb])
    return float(landscape.tables[i, idx])


def fitness_batch(landscape: NkLandscape, genomes) -> np.ndarray:
    """Fitness of each genome row: per-gene contributions summed in gene order, / n."""
    genomes = _check_genomes(landscape, genomes)
    bits = genomes[:, landscape._lookup_cols]            # (m, n, k+1)
    idx = np.zeros(bits.shape[:2], dtype=np.int64)
    for j in range(bits.shape[2]):
        idx = (idx << 1) | bits[:, :, j]
    contrib = landscape.tables[landscape._rows, idx]     # (m, n)
    total = np.zeros(genomes.shape[0])
    for i in range(landscape.n):
        total += contrib[:, i]
    return total / landscape.n


def nk_fitness(landscape: NkLandscape, genome) -> float:
    """Normalized fitness of one genome; always in [0, 1]."""
    return float(fitness_batch(landscape, np.asarray(genome)[None, :])[0])


def gen_dataset(landscape: NkLandscape, count: int, seed: int) -> Dataset:
    """Sample `count` uniform genomes (with replacement); encode bits as ±1.0.

    Deterministic in (landscape, count, seed); the generator is independent
    of the landscape's construction stream.
    """
    if count < 1:
        raise ParameterError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    bits = rng.integers(0, 2, size=(count, landscape.n), dtype=np.uint8)
    inputs = bits.astype(np.float64) * 2.0 - 1.0
    targets = fitness_batch(landscape, bits)
    meta = {
        "landscape_seed": landscape.seed,
        "dataset_seed": int(seed),
        "n": landscape.n,
        "k": landscape.k,
        "count": int(count),
        "neighbor_mode": landscape.neighbor_mode,
    }
    return Dataset(inputs, targets, meta)


def save_landscape(landscape: NkLandscape, path) -> None:
    """Write the landscape as JSON with tables in full, portable across RNGs."""
    payload = {
        "n": landscape.n,
        "k": landscape.k,
        "seed": landscape.seed,
        "neighbor_mode": landscape.neighbor_mode,
        "neighbors": landscape.neighbors.tolist(),
        "tables": landscape.tables.tolist(),
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_landscape(path) -> NkLandscape:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    return NkLandscape(
        payload["n"],
        payload["k"],
        payload["seed"],
        payload["neighbors"],
        payload["tables"],
        payload.get("neighbor_mode", "random"),
    )


def _meta_path(path) -> Path:
    return Path(path).with_suffix(".meta.json")


def save_dataset(dataset: Dataset, path) -> None:
    """Write examples as CSV (x1..xN,y) plus a sibling .meta.json with seeds.

    Inputs are serialized as -1/1; targets with full round-trip precision.
    """
    path = Path(path)
    n = dataset.n
    lines = [",".join([f"x{i + 1}" for i in range(n)] + ["y"])]
    for row, y in zip(dataset.inputs, dataset.targets):
        cells = ["1" if v > 0 else "-1" for v in row]
        cells.append(repr(float(y)))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    _meta_path(path).write_text(json.dumps(dataset.meta), encoding="utf-8")


def load_dataset(path) -> Dataset:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
        n = len(header) - 1
        inputs, targets = [], []
        for line in fh:
            cells = line.rstrip("\n").split(",")
            inputs.append([float(c) for c in cells[:n]])
            targets.append(float(cells[n]))
    meta = {}
    mp = _meta_path(path)
    if mp.exists():
        meta = json.loads(mp.read_text(encoding="utf-8"))
    return Dataset(np.asarray(inputs), np.asarray(targets), meta)
