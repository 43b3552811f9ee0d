"""Desk-scale SGD harness that produces stochastic-gradient-noise samples.

A small fully connected classifier is trained with constant-rate
minibatch SGD; at checkpoint iterations the harness freezes the
weights, draws M independent probe minibatches (uniform with
replacement, same size as the training batch), and records the noise
vectors grad_minibatch - grad_fullbatch as rows of a NoiseMatrix.  The
projection battery then judges each checkpoint's noise for
Gaussianity.

All arithmetic is float64 with a fixed accumulation order, so every
output is bit-identical across runs for fixed seeds.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DataFormatError, ParameterError, ShapeMismatchError
from .projection import (
    DirectionSet,
    NoiseMatrix,
    NoiseMeta,
    ProjectionReport,
    battery,
    random_directions,
)
from .rng import child_seed, make_generator

_ACTIVATIONS = ("relu", "tanh")

IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801


@dataclass(frozen=True, eq=False)
class Dataset:
    """A fixed classification dataset: n inputs of dimension d, C classes."""

    inputs: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        inputs = np.ascontiguousarray(self.inputs, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if inputs.ndim != 2:
            raise ParameterError(f"inputs must be 2-D, got shape {inputs.shape}")
        if labels.ndim != 1:
            raise ParameterError(f"labels must be 1-D, got shape {labels.shape}")
        if inputs.shape[0] != labels.shape[0]:
            raise ShapeMismatchError(
                f"{inputs.shape[0]} inputs but {labels.shape[0]} labels"
            )
        if inputs.shape[0] < 1:
            raise ParameterError("dataset must contain at least one example")
        if not np.all(np.isfinite(inputs)):
            raise ParameterError("inputs contain non-finite values")
        if self.n_classes < 2:
            raise ParameterError(f"need at least 2 classes, got {self.n_classes}")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_classes):
            raise ParameterError(
                f"labels must lie in [0, {self.n_classes}), got range "
                f"[{labels.min()}, {labels.max()}]"
            )
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def d(self) -> int:
        return self.inputs.shape[1]


@dataclass(frozen=True, eq=False)
class ModelState:
    """Weights and biases of a fully connected net, plus its nonlinearity.

    ``weights[l]`` has shape (sizes[l], sizes[l+1]); hidden layers apply
    the activation, the final layer emits raw logits.
    """

    weights: tuple
    biases: tuple
    activation: str = "relu"

    def __post_init__(self):
        if self.activation not in _ACTIVATIONS:
            raise ParameterError(
                f"activation must be one of {_ACTIVATIONS}, got {self.activation!r}"
            )
        if len(self.weights) != len(self.biases) or not self.weights:
            raise ParameterError("need one bias vector per weight matrix")
        weights = tuple(np.ascontiguousarray(w, dtype=np.float64) for w in self.weights)
        biases = tuple(np.ascontiguousarray(b, dtype=np.float64) for b in self.biases)
        prev = None
        for l, (w, b) in enumerate(zip(weights, biases)):
            if w.ndim != 2 or b.ndim != 1 or w.shape[1] != b.shape[0]:
                raise ShapeMismatchError(
                    f"layer {l}: weight shape {w.shape} incompatible with bias shape {b.shape}"
                )
            if prev is not None and w.shape[0] != prev:
                raise ShapeMismatchError(
                    f"layer {l}: expects input size {prev}, weight has {w.shape[0]} rows"
                )
            if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
                raise ParameterError(f"layer {l}: non-finite parameters")
            prev = w.shape[1]
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "biases", biases)

    @property
    def layer_sizes(self) -> tuple:
        return (self.weights[0].shape[0],) + tuple(w.shape[1] for w in self.weights)

    @property
    def p(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def to_vector(self) -> np.ndarray:
        """Pack all parameters into one p-vector, layer by layer, W then b."""
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b)
        return np.concatenate(parts)

    def with_vector(self, vec: np.ndarray) -> "ModelState":
        """A new state with the same shapes, parameters taken from ``vec``."""
        vec = np.asarray(vec, dtype=np.float64)
        if vec.shape != (self.p,):
            raise ShapeMismatchError(f"expected vector of length {self.p}, got shape {vec.shape}")
        weights, biases, pos = [], [], 0
        for w, b in zip(self.weights, self.biases):
            weights.append(vec[pos : pos + w.size].reshape(w.shape).copy())
            pos += w.size
            biases.append(vec[pos : pos + b.size].copy())
            pos += b.size
        return ModelState(tuple(weights), tuple(biases), self.activation)


def init_model(layer_sizes: Sequence[int], seed: int, activation: str = "relu") -> ModelState:
    """Xavier-uniform weights, zero biases, deterministic in the seed.

    Each weight entry is uniform on +/- sqrt(6 / (fan_in + fan_out)).
    """
    sizes = [int(s) for s in layer_sizes]
    if len(sizes) < 2:
        raise ParameterError(f"need at least 2 layer sizes, got {sizes}")
    if any(s < 1 for s in sizes):
        raise ParameterError(f"layer sizes must be >= 1, got {sizes}")
    rng = make_generator(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return ModelState(tuple(weights), tuple(biases), activation)


def _check_indices(data: Dataset, index_set) -> np.ndarray:
    idx = np.asarray(index_set, dtype=np.int64)
    if idx.ndim != 1 or idx.size == 0:
        raise ParameterError("index set must be a nonempty 1-D sequence")
    if idx.min() < 0 or idx.max() >= data.n:
        raise ParameterError(
            f"indices must lie in [0, {data.n}), got range [{idx.min()}, {idx.max()}]"
        )
    return idx


def _forward(model: ModelState, x: np.ndarray):
    """Return (logits, per-layer pre-activations, per-layer activations)."""
    pre, post = [], [x]
    h = x
    last = len(model.weights) - 1
    for l, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = h @ w + b
        pre.append(z)
        if l == last:
            h = z
        elif model.activation == "relu":
            h = np.maximum(z, 0.0)
        else:
            h = np.tanh(z)
        post.append(h)
    return h, pre, post


def logits(model: ModelState, data: Dataset, index_set) -> np.ndarray:
    """Raw network outputs for the given examples."""
    idx = _check_indices(data, index_set)
    return _forward(model, data.inputs[idx])[0]


def loss_and_grad(model: ModelState, data: Dataset, index_set) -> tuple:
    """Mean softmax cross-entropy over the index set and its exact gradient.

    The gradient is computed by reverse-mode differentiation and packed
    into a p-vector in ``to_vector`` order.  Duplicate indices are
    legitimate (with-replacement minibatches) and weighted accordingly.
    """
    idx = _check_indices(data, index_set)
    x, y = data.inputs[idx], data.labels[idx]
    m = idx.size

    z, pre, post = _forward(model, x)
    zmax = z.max(axis=1, keepdims=True)
    shifted = z - zmax
    expz = np.exp(shifted)
    sumexp = expz.sum(axis=1, keepdims=True)
    log_probs = shifted - np.log(sumexp)
    loss = float(-log_probs[np.arange(m), y].mean())

    delta = expz / sumexp
    delta[np.arange(m), y] -= 1.0
    delta /= m

    grads_w = [None] * len(model.weights)
    grads_b = [None] * len(model.weights)
    for l in range(len(model.weights) - 1, -1, -1):
        grads_w[l] = post[l].T @ delta
        grads_b[l] = delta.sum(axis=0)
        if l == 0:
            break
        delta = delta @ model.weights[l].T
        if model.activation == "relu":
            delta = np.where(pre[l - 1] > 0.0, delta, 0.0)
        else:
            delta = delta * (1.0 - post[l] ** 2)

    parts = []
    for gw, gb in zip(grads_w, grads_b):
        parts.append(gw.ravel())
        parts.append(gb)
    return loss, np.concatenate(parts)


def accuracy(model: ModelState, data: Dataset, index_set=None) -> float:
    """Fraction of examples whose argmax logit matches the label."""
    idx = np.arange(data.n) if index_set is None else _check_indices(data, index_set)
    z = _forward(model, data.inputs[idx])[0]
    return float((z.argmax(axis=1) == data.labels[idx]).mean())


def sgd_step(model: ModelState, data: Dataset, batch_indices, learning_rate: float) -> ModelState:
    """One SGD update: w <- w - lr * grad f(w; batch)."""
    if not learning_rate >= 0.0:
        raise ParameterError(f"learning rate must be >= 0, got {learning_rate!r}")
    _, grad = loss_and_grad(model, data, batch_indices)
    return model.with_vector(model.to_vector() - learning_rate * grad)


def extract_sgn(
    model: ModelState,
    data: Dataset,
    b: int,
    m_batches: int,
    seed: int,
    iteration: Optional[int] = None,
    force_full_batch: bool = False,
) -> NoiseMatrix:
    """Sample the stochastic-gradient-noise distribution at fixed weights.

    Row j holds grad f(w; B_j) - grad f(w; [n]) for an independent probe
    minibatch B_j of b indices drawn uniformly with replacement.  The
    full-batch gradient is computed once.  With ``force_full_batch`` the
    sampling is replaced by the full index set (requires b = n), which
    makes every row exactly zero; useful as a self-check.
    """
    if not 1 <= b <= data.n:
        raise ParameterError(f"batch size must lie in [1, {data.n}], got {b}")
    if m_batches < 8:
        raise ParameterError(f"need at least 8 probe minibatches, got {m_batches}")
    if force_full_batch and b != data.n:
        raise ParameterError("force_full_batch requires b = n")
    full = np.arange(data.n)
    _, full_grad = loss_and_grad(model, data, full)
    rows = np.empty((m_batches, full_grad.size))
    rng = make_generator(seed)
    for j in range(m_batches):
        idx = full if force_full_batch else rng.integers(0, data.n, size=b)
        _, g = loss_and_grad(model, data, idx)
        rows[j] = g - full_grad
    return NoiseMatrix(rows, NoiseMeta(iteration=iteration, batch_size=b, seed=seed))


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters of one training-and-probing run."""

    batch_size: int
    learning_rate: float
    iterations: int
    checkpoint_every: int = 100
    sgn_minibatches: int = 1000
    seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ParameterError(f"batch size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0.0:
            raise ParameterError(f"learning rate must be > 0, got {self.learning_rate!r}")
        if self.iterations < 0:
            raise ParameterError(f"iterations must be >= 0, got {self.iterations}")
        if self.checkpoint_every < 1:
            raise ParameterError(
                f"checkpoint_every must be >= 1, got {self.checkpoint_every}"
            )
        if self.sgn_minibatches < 8:
            raise ParameterError(
                f"need at least 8 probe minibatches, got {self.sgn_minibatches}"
            )


@dataclass(frozen=True)
class ProbeConfig:
    """How each checkpoint's noise is tested."""

    n_directions: int = 1000
    level: float = 0.05
    workers: int = 1

    def __post_init__(self):
        if self.n_directions < 1:
            raise ParameterError(f"need at least 1 direction, got {self.n_directions}")
        if self.workers < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True, eq=False)
class Checkpoint:
    """Snapshot of one probed training iteration."""

    iteration: int
    model: ModelState
    loss: float
    train_accuracy: float
    noise_ref: Optional[str] = None
    noise: Optional[NoiseMatrix] = None


NoiseSink = Callable[[int, NoiseMatrix], Optional[str]]


def train_and_probe(
    config: TrainConfig,
    data: Dataset,
    probe: ProbeConfig = ProbeConfig(),
    layer_sizes: Optional[Sequence[int]] = None,
    activation: str = "relu",
    noise_sink: Optional[NoiseSink] = None,
    keep_noise: bool = False,
    force_full_batch: bool = False,
) -> list:
    """Run SGD for ``config.iterations`` steps, probing at checkpoints.

    A checkpoint fires at every iteration divisible by
    ``checkpoint_every`` (including 0 and, when divisible, the final
    iteration): the weights are snapshotted, full-batch loss and
    training accuracy recorded, the noise matrix extracted, and the
    projection battery run against one direction set shared by all
    checkpoints.  ``noise_sink`` may persist each NoiseMatrix and return
    a reference string; unless ``keep_noise`` is set the matrix itself
    is dropped afterwards to bound memory.

    Returns [(Checkpoint, ProjectionReport), ...] in iteration order,
    deterministic in ``config.seed`` alone.
    """
    if config.batch_size > data.n:
        raise ParameterError(
            f"batch size {config.batch_size} exceeds dataset size {data.n}"
        )
    if layer_sizes is None:
        layer_sizes = (data.d, 128, 128, data.n_classes)
    else:
        layer_sizes = tuple(int(s) for s in layer_sizes)
        if layer_sizes[0] != data.d or layer_sizes[-1] != data.n_classes:
            raise ShapeMismatchError(
                f"layer sizes {layer_sizes} do not match data (d={data.d}, C={data.n_classes})"
            )

    model = init_model(layer_sizes, child_seed(config.seed, 0), activation)
    dirs = random_directions(model.p, probe.n_directions, child_seed(config.seed, 1))
    batch_rng = make_generator(config.seed, 2)

    out = []

    def checkpoint(t: int, state: ModelState) -> None:
        loss, _ = loss_and_grad(state, data, np.arange(data.n))
        acc = accuracy(state, data)
        noise = extract_sgn(
            state,
            data,
            config.batch_size,
            config.sgn_minibatches,
            child_seed(config.seed, 3, t),
            iteration=t,
            force_full_batch=force_full_batch,
        )
        report = battery(
            noise,
            dirs,
            level=probe.level,
            baseline_seed=child_seed(config.seed, 4, t),
            workers=probe.workers,
        )
        ref = noise_sink(t, noise) if noise_sink is not None else None
        out.append(
            (
                Checkpoint(
                    iteration=t,
                    model=state,
                    loss=loss,
                    train_accuracy=acc,
                    noise_ref=ref,
                    noise=noise if keep_noise else None,
                ),
                report,
            )
        )

    for t in range(config.iterations):
        if t % config.checkpoint_every == 0:
            checkpoint(t, model)
        batch = batch_rng.integers(0, data.n, size=config.batch_size)
        model = sgd_step(model, data, batch, config.learning_rate)
    if config.iterations % config.checkpoint_every == 0:
        checkpoint(config.iterations, model)
    return out


def synth_blobs(n: int, d: int, n_classes: int, spread: float, seed: int) -> Dataset:
    """Gaussian class blobs: class c is an isotropic cloud at a random center.

    Labels cycle 0..C-1 so classes are balanced; centers are standard
    normal in R^d and each input adds ``spread`` times standard normal
    noise to its class center.  Deterministic in the seed.
    """
    if n_classes < 2:
        raise ParameterError(f"need at least 2 classes, got {n_classes}")
    if n < 1 or d < 1:
        raise ParameterError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    if spread < 0:
        raise ParameterError(f"spread must be >= 0, got {spread}")
    rng = make_generator(seed)
    centers = rng.standard_normal((n_classes, d))
    labels = np.arange(n, dtype=np.int64) % n_classes
    inputs = centers[labels] + spread * rng.standard_normal((n, d))
    return Dataset(inputs, labels, n_classes)


def _read_idx_header(raw: bytes, path, expected_magic: int, expected_dims: int):
    if len(raw) < 4 * (1 + expected_dims):
        raise DataFormatError(f"{path}: truncated IDX header")
    magic = struct.unpack(">I", raw[:4])[0]
    if magic != expected_magic:
        raise DataFormatError(
            f"{path}: bad IDX magic 0x{magic:08x}, expected 0x{expected_magic:08x}"
        )
    dims = struct.unpack(f">{expected_dims}I", raw[4 : 4 + 4 * expected_dims])
    return dims, 4 + 4 * expected_dims


def load_idx(images_path: Union[str, Path], labels_path: Union[str, Path]) -> Dataset:
    """Load an IDX image/label pair (the MNIST container format).

    Dimensions are big-endian uint32; pixel bytes are scaled to [0, 1]
    and each image flattened row-major.  The class count is taken as
    max label + 1.
    """
    with open(images_path, "rb") as fh:
        raw = fh.read()
    (count, rows, cols), offset = _read_idx_header(raw, images_path, IDX_IMAGES_MAGIC, 3)
    if len(raw) - offset != count * rows * cols:
        raise DataFormatError(
            f"{images_path}: expected {count * rows * cols} pixel bytes, found {len(raw) - offset}"
        )
    images = np.frombuffer(raw, dtype=np.uint8, offset=offset).reshape(count, rows * cols)

    with open(labels_path, "rb") as fh:
        raw = fh.read()
    (label_count,), offset = _read_idx_header(raw, labels_path, IDX_LABELS_MAGIC, 1)
    if len(raw) - offset != label_count:
        raise DataFormatError(
            f"{labels_path}: expected {label_count} label bytes, found {len(raw) - offset}"
        )
    labels = np.frombuffer(raw, dtype=np.uint8, offset=offset).astype(np.int64)

    if count != label_count:
        raise DataFormatError(
            f"count mismatch: {count} images in {images_path} but {label_count} labels in {labels_path}"
        )
    if count == 0:
        raise DataFormatError(f"{images_path}: empty dataset")
    return Dataset(images / 255.0, labels, int(labels.max()) + 1)
