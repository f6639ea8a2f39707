"""The three network variants and their objective functions.

All three share the same supervised core: N inputs, H sigmoid hidden nodes
with biases, one sigmoid output node with bias. The variants differ in how
they reconstruct the inputs:

* nan — every hidden neuron carries its own N decoder weights and is scored
  on reconstructing all inputs from its activation alone;
* ann — one conventional N-node decoder layer reads the whole hidden layer;
* nn  — no decoder at all.

Pre-activations are clamped to [-500, 500] before exponentiation so that
mutation-inflated weights can never overflow. Decoder nodes default to
sigmoid activation with no bias; both are configurable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .landscape import Dataset

ARCHS = ("nan", "ann", "nn")
DECODER_ACTIVATIONS = ("sigmoid", "tanh", "linear")

CLAMP = 500.0


def sigmoid(x: float) -> float:
    """Logistic function with the pre-activation clamped to [-500, 500]."""
    if x > CLAMP:
        x = CLAMP
    elif x < -CLAMP:
        x = -CLAMP
    return 1.0 / (1.0 + math.exp(-x))


def sigmoid_vec(x: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
    """Vectorized clamped logistic; writes into `out` when given."""
    if out is None:
        out = np.empty_like(x)
    np.clip(x, -CLAMP, CLAMP, out=out)
    np.negative(out, out=out)
    np.exp(out, out=out)
    out += 1.0
    np.reciprocal(out, out=out)
    return out


def _dec_act_scalar(name, x):
    if name == "sigmoid":
        return sigmoid(x)
    if name == "tanh":
        return math.tanh(x)
    return x


def _dec_act_vec(name, x, out=None):
    if name == "sigmoid":
        return sigmoid_vec(x, out=out)
    if name == "tanh":
        return np.tanh(x, out=out) if out is not None else np.tanh(x)
    if out is not None and out is not x:
        np.copyto(out, x)
        return out
    return x


@dataclass
class MlpCore:
    """Encoder weights plus the single supervised output node."""

    encoder: np.ndarray       # (h, n)
    hidden_bias: np.ndarray   # (h,)
    output_w: np.ndarray      # (h,)
    output_bias: float

    @property
    def h(self):
        return self.encoder.shape[0]

    @property
    def n(self):
        return self.encoder.shape[1]

    def copy(self):
        return MlpCore(
            self.encoder.copy(),
            self.hidden_bias.copy(),
            self.output_w.copy(),
            float(self.output_bias),
        )


class _NetworkBase:
    arch = ""

    def __init__(self, core: MlpCore):
        self.core = core

    @property
    def n(self):
        return self.core.n

    @property
    def h(self):
        return self.core.h

    @property
    def encoder(self):
        return self.core.encoder

    @property
    def hidden_bias(self):
        return self.core.hidden_bias

    @property
    def output_w(self):
        return self.core.output_w

    @property
    def output_bias(self):
        return self.core.output_bias

    @output_bias.setter
    def output_bias(self, value):
        self.core.output_bias = value


class NnNetwork(_NetworkBase):
    """Plain feedforward baseline with no reconstruction objective."""

    arch = "nn"

    def copy(self):
        return NnNetwork(self.core.copy())


class NanNetwork(_NetworkBase):
    """Network whose hidden neurons each own an N-weight decoder.

    decoder[j][i] is the single weight from neuron j's activation to its
    reconstruction of input i.
    """

    arch = "nan"

    def __init__(self, core, decoder, decoder_bias=None, decoder_activation="sigmoid"):
        super().__init__(core)
        self.decoder = np.asarray(decoder, dtype=np.float64)      # (h, n)
        self.decoder_bias = decoder_bias                          # (h, n) or None
        self.decoder_activation = decoder_activation
        if self.decoder.shape != (self.h, self.n):
            raise ParameterError(f"decoder must have shape ({self.h}, {self.n})")
        if decoder_bias is not None and np.shape(decoder_bias) != (self.h, self.n):
            raise ParameterError(f"decoder_bias must have shape ({self.h}, {self.n})")

    def copy(self):
        return NanNetwork(
            self.core.copy(),
            self.decoder.copy(),
            None if self.decoder_bias is None else self.decoder_bias.copy(),
            self.decoder_activation,
        )


class AnnNetwork(_NetworkBase):
    """Network with one conventional decoder layer over the hidden layer.

    layer_decoder[i][j] is the weight from hidden node j to decoder node i.
    """

    arch = "ann"

    def __init__(self, core, layer_decoder, layer_decoder_bias=None, decoder_activation="sigmoid"):
        super().__init__(core)
        self.layer_decoder = np.asarray(layer_decoder, dtype=np.float64)  # (n, h)
        self.layer_decoder_bias = layer_decoder_bias                      # (n,) or None
        self.decoder_activation = decoder_activation
        if self.layer_decoder.shape != (self.n, self.h):
            raise ParameterError(f"layer_decoder must have shape ({self.n}, {self.h})")
        if layer_decoder_bias is not None and np.shape(layer_decoder_bias) != (self.n,):
            raise ParameterError(f"layer_decoder_bias must have shape ({self.n},)")

    def copy(self):
        return AnnNetwork(
            self.core.copy(),
            self.layer_decoder.copy(),
            None if self.layer_decoder_bias is None else self.layer_decoder_bias.copy(),
            self.decoder_activation,
        )


Network = NnNetwork | NanNetwork | AnnNetwork


def init_network(arch: str, n: int, config, rng: np.random.Generator) -> Network:
    """Seed a fresh network with every parameter uniform in [-1, 1].

    Draw order: encoder row-major, hidden biases, output weights, output
    bias, then decoder weights row-major (and decoder biases when enabled).
    """
    if arch not in ARCHS:
        raise ParameterError(f"arch must be one of {ARCHS}, got {arch!r}")
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    h = config.h
    if h < 1:
        raise ParameterError(f"h must be >= 1, got {h}")
    core = MlpCore(
        rng.uniform(-1.0, 1.0, size=(h, n)),
        rng.uniform(-1.0, 1.0, size=h),
        rng.uniform(-1.0, 1.0, size=h),
        float(rng.uniform(-1.0, 1.0)),
    )
    if arch == "nn":
        return NnNetwork(core)
    if arch == "nan":
        decoder = rng.uniform(-1.0, 1.0, size=(h, n))
        bias = rng.uniform(-1.0, 1.0, size=(h, n)) if config.decoder_bias else None
        return NanNetwork(core, decoder, bias, config.decoder_activation)
    decoder = rng.uniform(-1.0, 1.0, size=(n, h))
    bias = rng.uniform(-1.0, 1.0, size=n) if config.decoder_bias else None
    return AnnNetwork(core, decoder, bias, config.decoder_activation)


def _check_input(network, x):
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (network.n,):
        raise ParameterError(f"input must have length {network.n}, got shape {x.shape}")
    return x


def hidden_activation(network: Network, j: int, x) -> float:
    """Activation of hidden node j on a single input vector."""
    if not 0 <= j < network.h:
        raise ParameterError(f"hidden index must lie in [0, {network.h}), got {j}")
    x = _check_input(network, x)
    return sigmoid(float(network.hidden_bias[j] + network.encoder[j] @ x))


def forward(network: Network, x) -> float:
    """Supervised output for a single input vector; strictly inside (0, 1)."""
    x = _check_input(network, x)
    pre = network.encoder @ x + network.hidden_bias
    act = sigmoid_vec(pre)
    return sigmoid(float(network.output_bias + network.output_w @ act))


def decode_neuron(nan: NanNetwork, j: int, activation: float) -> np.ndarray:
    """Neuron j's reconstruction of all N inputs from one activation value."""
    if not 0 <= j < nan.h:
        raise ParameterError(f"hidden index must lie in [0, {nan.h}), got {j}")
    pre = nan.decoder[j] * activation
    if nan.decoder_bias is not None:
        pre = pre + nan.decoder_bias[j]
    return _dec_act_vec(nan.decoder_activation, pre)


def decode_layer(ann: AnnNetwork, hidden) -> np.ndarray:
    """Decoder-layer reconstruction of all N inputs from the hidden vector."""
    hidden = np.asarray(hidden, dtype=np.float64)
    if hidden.shape != (ann.h,):
        raise ParameterError(f"hidden vector must have length {ann.h}, got shape {hidden.shape}")
    pre = ann.layer_decoder @ hidden
    if ann.layer_decoder_bias is not None:
        pre = pre + ann.layer_decoder_bias
    return _dec_act_vec(ann.decoder_activation, pre)


def hidden_batch(network: Network, X: np.ndarray) -> np.ndarray:
    """Hidden activations for every example row; shape (count, h)."""
    return sigmoid_vec(X @ network.encoder.T + network.hidden_bias)


def forward_batch(network: Network, X: np.ndarray) -> np.ndarray:
    act = hidden_batch(network, X)
    return sigmoid_vec(act @ network.output_w + network.output_bias)


def _check_dataset(network, dataset):
    if dataset.count == 0:
        raise ParameterError("dataset must contain at least one example")
    if dataset.n != network.n:
        raise ParameterError(
            f"dataset input width {dataset.n} does not match network n={network.n}"
        )


def task_mse(network: Network, dataset: Dataset) -> float:
    """Mean squared supervised error over the dataset."""
    _check_dataset(network, dataset)
    d = forward_batch(network, dataset.inputs) - dataset.targets
    return float(d @ d) / dataset.count


def neuron_ae_mse(nan: NanNetwork, j: int, dataset: Dataset) -> float:
    """Neuron j's reconstruction MSE, averaged over examples and components."""
    if not 0 <= j < nan.h:
        raise ParameterError(f"hidden index must lie in [0, {nan.h}), got {j}")
    _check_dataset(nan, dataset)
    X = dataset.inputs
    act = sigmoid_vec(X @ nan.encoder[j] + nan.hidden_bias[j])
    pre = np.multiply.outer(act, nan.decoder[j])
    if nan.decoder_bias is not None:
        pre += nan.decoder_bias[j]
    rec = _dec_act_vec(nan.decoder_activation, pre, out=pre)
    rec -= X
    np.multiply(rec, rec, out=rec)
    return float(rec.sum()) / (dataset.count * nan.n)


def nan_mean_ae_mse(nan: NanNetwork, dataset: Dataset) -> float:
    """Reconstruction MSE averaged over the H neurons (the logged series)."""
    total = 0.0
    for j in range(nan.h):
        total += neuron_ae_mse(nan, j, dataset)
    return total / nan.h


def layer_ae_mse(ann: AnnNetwork, dataset: Dataset) -> float:
    """Decoder-layer reconstruction MSE over examples and components."""
    _check_dataset(ann, dataset)
    X = dataset.inputs
    act = hidden_batch(ann, X)
    pre = act @ ann.layer_decoder.T
    if ann.layer_decoder_bias is not None:
        pre += ann.layer_decoder_bias
    rec = _dec_act_vec(ann.decoder_activation, pre, out=pre)
    rec -= X
    np.multiply(rec, rec, out=rec)
    return float(rec.sum()) / (dataset.count * ann.n)


def ae_mse(network: Network, dataset: Dataset) -> float | None:
    """Architecture-appropriate reconstruction MSE; None for plain networks."""
    if network.arch == "nan":
        return nan_mean_ae_mse(network, dataset)
    if network.arch == "ann":
        return layer_ae_mse(network, dataset)
    return None


def param_count(network: Network) -> int:
    n, h = network.n, network.h
    count = h * n + h + h + 1
    if network.arch == "nan":
        count += h * n + (h * n if network.decoder_bias is not None else 0)
    elif network.arch == "ann":
        count += n * h + (n if network.layer_decoder_bias is not None else 0)
    return count


# --- coordinate addressing -------------------------------------------------
#
# A coordinate is (layer, row, col). Scalars use row=col=0; vectors use col=0.
# For nan decoders row is the owning neuron; for ann decoders row is the
# decoder node (input index) and col the hidden node.

class Coord(NamedTuple):
    layer: str
    row: int
    col: int

    def __str__(self):
        return f"{self.layer}:{self.row}:{self.col}"


def parse_coord(text: str) -> Coord:
    layer, row, col = text.split(":")
    return Coord(layer, int(row), int(col))


def task_coord_count(network: Network) -> int:
    return network.h + 1


def autoencode_coord_count(network: Network) -> int:
    n, h = network.n, network.h
    count = h * n + h
    if network.arch == "nan":
        count += h * n + (h * n if network.decoder_bias is not None else 0)
    elif network.arch == "ann":
        count += n * h + (n if network.layer_decoder_bias is not None else 0)
    return count


def task_coord(network: Network, u: int) -> Coord:
    """Map a uniform index to an output-node coordinate."""
    if u < network.h:
        return Coord("output_w", u, 0)
    return Coord("output_bias", 0, 0)


def autoencode_coord(network: Network, u: int) -> Coord:
    """Map a uniform index to a hidden-layer-associated coordinate.

    Block order: encoder row-major, hidden biases, decoder row-major,
    decoder biases (when enabled).
    """
    n, h = network.n, network.h
    if u < h * n:
        return Coord("encoder", u // n, u % n)
    u -= h * n
    if u < h:
        return Coord("hidden_bias", u, 0)
    u -= h
    if network.arch == "nan":
        if u < h * n:
            return Coord("decoder", u // n, u % n)
        u -= h * n
        return Coord("decoder_bias", u // n, u % n)
    if network.arch == "ann":
        if u < n * h:
            return Coord("decoder", u // h, u % h)
        u -= n * h
        return Coord("decoder_bias", u, 0)
    raise ParameterError(f"autoencode index {u} out of range for arch {network.arch!r}")


def get_coord(network: Network, coord: Coord) -> float:
    layer, r, c = coord
    if layer == "encoder":
        return float(network.encoder[r, c])
    if layer == "hidden_bias":
        return float(network.hidden_bias[r])
    if layer == "output_w":
        return float(network.output_w[r])
    if layer == "output_bias":
        return float(network.output_bias)
    if layer == "decoder":
        if network.arch == "nan":
            return float(network.decoder[r, c])
        return float(network.layer_decoder[r, c])
    if layer == "decoder_bias":
        if network.arch == "nan":
            if network.decoder_bias is None:
                raise ParameterError("network has no decoder biases")
            return float(network.decoder_bias[r, c])
        if network.layer_decoder_bias is None:
            raise ParameterError("network has no decoder biases")
        return float(network.layer_decoder_bias[r])
    raise ParameterError(f"unknown coordinate layer {layer!r}")


def set_coord(network: Network, coord: Coord, value: float) -> None:
    layer, r, c = coord
    if layer == "encoder":
        network.encoder[r, c] = value
    elif layer == "hidden_bias":
        network.hidden_bias[r] = value
    elif layer == "output_w":
        network.output_w[r] = value
    elif layer == "output_bias":
        network.output_bias = value
    elif layer == "decoder":
        if network.arch == "nan":
            network.decoder[r, c] = value
        else:
            network.layer_decoder[r, c] = value
    elif layer == "decoder_bias":
        if network.arch == "nan":
            if network.decoder_bias is None:
                raise ParameterError("network has no decoder biases")
            network.decoder_bias[r, c] = value
        else:
            if network.layer_decoder_bias is None:
                raise ParameterError("network has no decoder biases")
            network.layer_decoder_bias[r] = value
    else:
        raise ParameterError(f"unknown coordinate layer {layer!r}")


def networks_equal(a: Network, b: Network) -> bool:
    """Bit-for-bit parameter equality (used by revert audits)."""
    if a.arch != b.arch or a.n != b.n or a.h != b.h:
        return False
    same = (
        np.array_equal(a.encoder, b.encoder)
        and np.array_equal(a.hidden_bias, b.hidden_bias)
        and np.array_equal(a.output_w, b.output_w)
        and a.output_bias == b.output_bias
    )
    if not same:
        return False
    if a.arch == "nan":
        if not np.array_equal(a.decoder, b.decoder):
            return False
        if (a.decoder_bias is None) != (b.decoder_bias is None):
            return False
        return a.decoder_bias is None or np.array_equal(a.decoder_bias, b.decoder_bias)
    if a.arch == "ann":
        if not np.array_equal(a.layer_decoder, b.layer_decoder):
            return False
        if (a.layer_decoder_bias is None) != (b.layer_decoder_bias is None):
            return False
        return a.layer_decoder_bias is None or np.array_equal(
            a.layer_decoder_bias, b.layer_decoder_bias
        )
    return True


def save_network(network: Network, path) -> None:
    """JSON snapshot with full round-trip precision, enough to resume a run."""
    payload = {
        "arch": network.arch,
        "n": network.n,
        "h": network.h,
        "encoder": network.encoder.tolist(),
        "hidden_bias": network.hidden_bias.tolist(),
        "output_w": network.output_w.tolist(),
        "output_bias": float(network.output_bias),
    }
    if network.arch == "nan":
        payload["decoder_activation"] = network.decoder_activation
        payload["decoder"] = network.decoder.tolist()
        payload["decoder_bias"] = (
            None if network.decoder_bias is None else network.decoder_bias.tolist()
        )
    elif network.arch == "ann":
        payload["decoder_activation"] = network.decoder_activation
        payload["layer_decoder"] = network.layer_decoder.tolist()
        payload["layer_decoder_bias"] = (
            None
            if network.layer_decoder_bias is None
            else network.layer_decoder_bias.tolist()
        )
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_network(path) -> Network:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    core = MlpCore(
        np.asarray(payload["encoder"], dtype=np.float64),
        np.asarray(payload["hidden_bias"], dtype=np.float64),
        np.asarray(payload["output_w"], dtype=np.float64),
        float(payload["output_bias"]),
    )
    arch = payload["arch"]
    if arch == "nn":
        return NnNetwork(core)
    if arch == "nan":
        bias = payload["decoder_bias"]
        return NanNetwork(
            core,
            np.asarray(payload["decoder"], dtype=np.float64),
            None if bias is None else np.asarray(bias, dtype=np.float64),
            payload["decoder_activation"],
        )
    bias = payload["layer_decoder_bias"]
    return AnnNetwork(
        core,
        np.asarray(payload["layer_decoder"], dtype=np.float64),
        None if bias is None else np.asarray(bias, dtype=np.float64),
        payload["decoder_activation"],
    )
