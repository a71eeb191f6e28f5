"""Minimal dense feed-forward networks with manual backprop and Adam.

Used for the per-channel Q-networks and for the learned dynamics model.
Kept deliberately small and dependency-free (numpy only) so that training
is bit-deterministic for a fixed seed and gradients can be checked against
finite differences.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DataError, DimensionError

_MAGIC = b"NNV1"


@dataclass
class Network:
    """Dense MLP: ReLU hidden layers, linear output.

    weights[i] has shape (layer_sizes[i], layer_sizes[i+1]); biases[i] has
    shape (layer_sizes[i+1],). All parameters are float64.
    """

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    activation: str = "relu"

    @property
    def input_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def output_dim(self) -> int:
        return self.layer_sizes[-1]

    def parameter_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


@dataclass
class OptimizerState:
    """Adam accumulators, one slot per parameter array ([W0, b0, W1, b1, ...])."""

    learning_rate: float
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    step: int = 0


def init_network(layer_sizes: list[int], seed: int, activation: str = "relu") -> Network:
    """Create a network with fan-in-scaled uniform weights and zero biases.

    Deterministic for a fixed seed.
    """
    sizes = [int(n) for n in layer_sizes]
    if len(sizes) < 2 or any(n < 1 for n in sizes):
        raise ConfigurationError(f"layer_sizes must have >=2 entries, all >=1: {layer_sizes}")
    if activation != "relu":
        raise ConfigurationError(f"unsupported activation: {activation!r}")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Network(sizes, weights, biases, activation)


def make_optimizer(net: Network, learning_rate: float) -> OptimizerState:
    if learning_rate <= 0:
        raise ConfigurationError(f"learning_rate must be positive: {learning_rate}")
    opt = OptimizerState(learning_rate=float(learning_rate))
    for w, b in zip(net.weights, net.biases):
        opt.m.extend([np.zeros_like(w), np.zeros_like(b)])
        opt.v.extend([np.zeros_like(w), np.zeros_like(b)])
    return opt


def forward_batch(net: Network, inputs: np.ndarray) -> np.ndarray:
    """Forward pass on a (B, input_dim) batch; returns (B, output_dim)."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionError(f"expected (B, {net.input_dim}) input, got {x.shape}")
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        x = x @ w + b
        if i < last:
            x = np.maximum(x, 0.0)
    return x


def forward(net: Network, input_vec: np.ndarray) -> np.ndarray:
    """Forward pass on a single input vector. Pure: no state is modified."""
    x = np.asarray(input_vec, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != net.input_dim:
        raise DimensionError(f"expected input of length {net.input_dim}, got shape {x.shape}")
    return forward_batch(net, x[None, :])[0]


def gradients(net: Network, inputs: np.ndarray, targets: np.ndarray) -> tuple[float, list[np.ndarray]]:
    """Mean-squared-error loss and its gradients w.r.t. [W0, b0, W1, b1, ...].

    Loss is the mean over every output element of the batch.
    """
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise DimensionError(f"expected (B, {net.input_dim}) inputs, got {x.shape}")
    if t.shape != (x.shape[0], net.output_dim):
        raise DimensionError(f"expected targets of shape {(x.shape[0], net.output_dim)}, got {t.shape}")

    last = len(net.weights) - 1
    acts = [x]          # post-activation per layer, acts[0] = input
    pre = []            # pre-activation per layer
    h = x
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = h @ w + b
        pre.append(z)
        h = np.maximum(z, 0.0) if i < last else z
        acts.append(h)

    out = acts[-1]
    diff = out - t
    loss = float(np.mean(diff * diff))

    grads: list[np.ndarray] = [None] * (2 * len(net.weights))  # type: ignore[list-item]
    delta = 2.0 * diff / diff.size
    for i in range(last, -1, -1):
        if i < last:
            delta = delta * (pre[i] > 0.0)
        grads[2 * i] = acts[i].T @ delta
        grads[2 * i + 1] = delta.sum(axis=0)
        if i > 0:
            delta = delta @ net.weights[i].T
    return loss, grads


def train_batch(
    net: Network,
    inputs: np.ndarray,
    targets: np.ndarray,
    opt: OptimizerState,
    clip_norm: float = 10.0,
) -> float:
    """One Adam step on the MSE of the batch; returns the pre-step loss.

    Non-finite inputs or targets are rejected before any parameter changes;
    gradients are clipped to a global L2 norm so parameters stay finite.
    """
    x = np.asarray(inputs, dtype=np.float64)
    t = np.asarray(targets, dtype=np.float64)
    if x.shape[0] == 0 or x.shape[0] != t.shape[0]:
        raise DataError(f"need matching non-empty batches, got {x.shape[0]} inputs / {t.shape[0]} targets")
    if not np.all(np.isfinite(t)):
        raise DataError("non-finite target")
    if not np.all(np.isfinite(x)):
        raise DataError("non-finite input")

    loss, grads = gradients(net, x, t)
    norm_sq = sum(float(np.sum(g * g)) for g in grads)
    if not np.isfinite(norm_sq):
        raise DataError("non-finite gradient")
    norm = np.sqrt(norm_sq)
    if clip_norm is not None and norm > clip_norm:
        grads = [g * (clip_norm / norm) for g in grads]

    opt.step += 1
    b1, b2, eps, lr = opt.beta1, opt.beta2, opt.epsilon, opt.learning_rate
    bc1 = 1.0 - b1**opt.step
    bc2 = 1.0 - b2**opt.step
    params = []
    for w, b in zip(net.weights, net.biases):
        params.extend([w, b])
    for p, g, m, v in zip(params, grads, opt.m, opt.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        p -= lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
    return loss


def clone_weights(src: Network, dst: Network) -> None:
    """Copy all parameters of src into dst; src is untouched."""
    if src.layer_sizes != dst.layer_sizes:
        raise ConfigurationError(f"shape mismatch: {src.layer_sizes} vs {dst.layer_sizes}")
    for i in range(len(src.weights)):
        dst.weights[i] = src.weights[i].copy()
        dst.biases[i] = src.biases[i].copy()


def clone_network(net: Network) -> Network:
    out = Network(
        list(net.layer_sizes),
        [w.copy() for w in net.weights],
        [b.copy() for b in net.biases],
        net.activation,
    )
    return out


def save_network(net: Network, path: str) -> None:
    """Write the versioned binary checkpoint format (see README)."""
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", len(net.layer_sizes)))
        fh.write(struct.pack(f"<{len(net.layer_sizes)}I", *net.layer_sizes))
        for w, b in zip(net.weights, net.biases):
            fh.write(np.ascontiguousarray(w, dtype="<f8").tobytes())
            fh.write(np.ascontiguousarray(b, dtype="<f8").tobytes())


def load_network(path: str) -> Network:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise DataError(f"bad checkpoint magic: {magic!r}")
        (n_layers,) = struct.unpack("<I", fh.read(4))
        sizes = list(struct.unpack(f"<{n_layers}I", fh.read(4 * n_layers)))
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            w = np.frombuffer(fh.read(8 * fan_in * fan_out), dtype="<f8").reshape(fan_in, fan_out)
            b = np.frombuffer(fh.read(8 * fan_out), dtype="<f8")
            weights.append(w.astype(np.float64).copy())
            biases.append(b.astype(np.float64).copy())
        trailing = fh.read(1)
        if trailing:
            raise DataError("trailing bytes in checkpoint")
    return Network(sizes, weights, biases)
