"""Minimal MLP classifier with hand-written backprop and an SGD trainer.

The network is fully connected with ReLU hidden layers and identity
output; forward, backward, and the optimizer are plain numpy so every
gradient can be checked against finite differences. The trainer applies
the crop-soften pipeline per sample and is bit-reproducible for a fixed
seed: dataset order, augmentation draws, and initialization all come
from split streams of one root RandomSource.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from .geometry import CropWindow, pad_and_crop, visibility
from .loss import LOSS_MODES
from .sampling import (
    GaussianCropConfig,
    RandomSource,
    ResizeCropConfig,
    UniformCropConfig,
    draw_offset,
    draw_uniform_offset,
)
from .softening import SofteningPolicy, label_smoothing_confidence, soften
from .data import LabeledDataset, hflip

_CHECKPOINT_MAGIC = b"SAMLP001"


class CheckpointError(ValueError):
    """Raised when checkpoint bytes are malformed or inconsistent."""


class NonFiniteLossError(RuntimeError):
    """Training produced a NaN or infinite loss or gradient."""

    def __init__(self, epoch: int, batch: int, lr: float):
        self.epoch = epoch
        self.batch = batch
        self.lr = lr
        super().__init__(
            f"non-finite loss in epoch {epoch}, batch {batch} (lr={lr:.6g}); "
            "reduce lr0 or check the input data"
        )


@dataclass
class MlpClassifier:
    """Fully connected ReLU network.

    ``weights[l]`` has shape (layer_sizes[l + 1], layer_sizes[l]) and
    ``biases[l]`` shape (layer_sizes[l + 1],). The final layer has no
    activation; its output is the logit vector.
    """

    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError(f"layer_sizes must be >= 2 positive entries, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)
        expected_w = [(sizes[i + 1], sizes[i]) for i in range(len(sizes) - 1)]
        if [w.shape for w in self.weights] != expected_w:
            raise ValueError("weight shapes do not match layer_sizes")
        if [b.shape for b in self.biases] != [(s,) for s in sizes[1:]]:
            raise ValueError("bias shapes do not match layer_sizes")

    @property
    def num_layers(self) -> int:
        return len(self.weights)


def init_mlp(layer_sizes: tuple[int, ...], rng: RandomSource) -> MlpClassifier:
    """Uniform init scaled by fan-in: every parameter ~ U(-1, 1)/sqrt(fan_in)."""
    sizes = tuple(int(s) for s in layer_sizes)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / math.sqrt(fan_in)
        weights.append(rng.generator.uniform(-bound, bound, (fan_out, fan_in)))
        biases.append(rng.generator.uniform(-bound, bound, fan_out))
    return MlpClassifier(sizes, weights, biases)


def forward(model: MlpClassifier, image: np.ndarray) -> np.ndarray:
    """Logits for one input; the image is flattened to the input width."""
    x = np.asarray(image, dtype=float).reshape(-1)
    if x.size != model.layer_sizes[0]:
        raise ValueError(f"input size {x.size} != model input {model.layer_sizes[0]}")
    return _forward_batch(model, x[None, :])[0][0]


def forward_batch(model: MlpClassifier, inputs: np.ndarray) -> np.ndarray:
    """Logits (B, N) for a batch; rows are flattened to the input width."""
    x = np.asarray(inputs, dtype=float).reshape(inputs.shape[0], -1)
    if x.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"input size {x.shape[1]} != model input {model.layer_sizes[0]}")
    return _forward_batch(model, x)[0]


def _forward_batch(model: MlpClassifier, x: np.ndarray):
    """Returns (logits (B, N), activations, pre_activations) for backprop.

    ``activations[l]`` is the input to layer l; ``pre_activations[l]``
    is its affine output before ReLU (the last layer applies none).
    """
    activations = [x]
    pre_activations = []
    for layer, (w, b) in enumerate(zip(model.weights, model.biases)):
        z = x @ w.T + b
        pre_activations.append(z)
        x = np.maximum(z, 0.0) if layer < model.num_layers - 1 else z
        if layer < model.num_layers - 1:
            activations.append(x)
    return pre_activations[-1], activations, pre_activations


def _batch_targets(true_classes: np.ndarray, ps: np.ndarray, num_classes: int,
                   mode: str) -> tuple[np.ndarray, np.ndarray]:
    """Target rows and per-sample weights for a batch, by loss mode."""
    if mode not in LOSS_MODES:
        raise ValueError(f"mode must be one of {LOSS_MODES}, got {mode!r}")
    b = true_classes.shape[0]
    rows = np.arange(b)
    if mode in ("hard", "weight"):
        targets = np.zeros((b, num_classes))
        targets[rows, true_classes] = 1.0
    else:
        if (ps < 1.0 / num_classes - 1e-12).any() or (ps > 1.0).any():
            raise ValueError(f"confidences outside [1/{num_classes}, 1]")
        targets = np.repeat(((1.0 - ps) / (num_classes - 1))[:, None], num_classes, axis=1)
        targets[rows, true_classes] = ps
    weights = np.ones(b) if mode in ("hard", "target") else ps.astype(float)
    return targets, weights


def _backward_batch(model: MlpClassifier, x: np.ndarray, true_classes: np.ndarray,
                    ps: np.ndarray, mode: str):
    """Mean loss over the batch plus gradients for every parameter.

    Returns (loss, weight_grads, bias_grads, logits). The logit gradient
    of one sample is w * (softmax - target); all deeper gradients follow
    by the chain rule through ReLU masks.
    """
    logits, activations, pre_activations = _forward_batch(model, x)
    b, num_classes = logits.shape
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_q = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    q = np.exp(log_q)
    targets, weights = _batch_targets(true_classes, ps, num_classes, mode)
    mask = targets > 0
    safe = np.where(mask, targets, 1.0)
    kl = np.where(mask, targets * (np.log(safe) - log_q), 0.0).sum(axis=1)
    kl = np.maximum(kl, 0.0)
    loss = float((weights * kl).mean())
    delta = weights[:, None] * (q - targets) / b
    weight_grads = [np.empty(0)] * model.num_layers
    bias_grads = [np.empty(0)] * model.num_layers
    for layer in range(model.num_layers - 1, -1, -1):
        weight_grads[layer] = delta.T @ activations[layer]
        bias_grads[layer] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ model.weights[layer]) * (pre_activations[layer - 1] > 0)
    return loss, weight_grads, bias_grads, logits


def backward(model: MlpClassifier, image: np.ndarray, true_class: int,
             confidence: float, mode: str):
    """Single-sample loss and parameter gradients.

    Returns (loss, weight_grads, bias_grads) where the gradient lists
    mirror ``model.weights`` and ``model.biases``.
    """
    x = np.asarray(image, dtype=float).reshape(1, -1)
    if x.shape[1] != model.layer_sizes[0]:
        raise ValueError(f"input size {x.shape[1]} != model input {model.layer_sizes[0]}")
    loss, weight_grads, bias_grads, _ = _backward_batch(
        model, x, np.array([true_class]), np.array([confidence]), mode
    )
    return loss, weight_grads, bias_grads


def cosine_lr(epoch: int, total_epochs: int, lr0: float) -> float:
    """Half-cosine decay from lr0 at epoch 0 toward 0 at epoch == total."""
    if total_epochs < 1:
        raise ValueError(f"total_epochs must be >= 1, got {total_epochs}")
    if not 0 <= epoch <= total_epochs:
        raise ValueError(f"epoch {epoch} outside [0, {total_epochs}]")
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * epoch / total_epochs))


@dataclass(frozen=True)
class SigmaDecay:
    """Shrink the crop sigma by ``factor`` for the last ``final_epochs``."""

    final_epochs: int
    factor: float

    def __post_init__(self) -> None:
        if self.final_epochs < 0:
            raise ValueError(f"final_epochs must be >= 0, got {self.final_epochs}")
        if self.factor < 1.0:
            raise ValueError(f"factor must be >= 1, got {self.factor}")


@dataclass
class TrainConfig:
    epochs: int
    batch_size: int
    lr0: float
    policy: SofteningPolicy
    sampler: GaussianCropConfig | UniformCropConfig
    momentum: float = 0.9
    weight_decay: float = 5e-4
    seed: int = 0
    hidden_sizes: tuple[int, ...] = (256,)
    sigma_decay: SigmaDecay | None = None
    # constant label-smoothing confidence 1 - alpha instead of the
    # visibility-driven curve (the fixed-smoothing baseline arm)
    fixed_alpha: float | None = None

    def __post_init__(self) -> None:
        if self.fixed_alpha is not None and not 0.0 <= self.fixed_alpha < 1.0:
            raise ValueError(f"fixed_alpha must be in [0, 1), got {self.fixed_alpha}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr0 <= 0:
            raise ValueError(f"lr0 must be > 0, got {self.lr0}")
        if not 0.0 <= self.momentum < 1.0:
            raise ValueError(f"momentum must be in [0, 1), got {self.momentum}")
        if self.weight_decay < 0:
            raise ValueError(f"weight_decay must be >= 0, got {self.weight_decay}")
        if isinstance(self.sampler, ResizeCropConfig):
            raise ValueError(
                "resize-crop sampling needs sub-pixel resampling, which this "
                "integer-geometry trainer does not do; use gaussian or uniform"
            )
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        if any(h < 1 for h in self.hidden_sizes):
            raise ValueError(f"hidden sizes must be >= 1, got {self.hidden_sizes}")


@dataclass(frozen=True)
class EpochStats:
    """One training epoch: mean loss and top-1 error on the augmented
    training stream, plus the schedule values used."""

    epoch: int
    mean_loss: float
    top1_error: float
    lr: float
    sigma: float


def effective_sigma(epoch: int, cfg: TrainConfig) -> float:
    """Crop sigma in force at ``epoch``: the sampler's sigma, divided by
    the decay factor inside the final window. 0 for non-Gaussian samplers."""
    if not isinstance(cfg.sampler, GaussianCropConfig):
        return 0.0
    sigma = cfg.sampler.sigma
    decay = cfg.sigma_decay
    if decay is not None and epoch >= cfg.epochs - decay.final_epochs:
        return sigma / decay.factor
    return sigma


def _augment(image: np.ndarray, cfg: TrainConfig, sigma: float,
             rng: RandomSource) -> tuple[np.ndarray, float]:
    """Flip-then-crop one (C, H, W) image; returns (image, visibility)."""
    _, h, w = image.shape
    image = hflip(image, rng)
    if isinstance(cfg.sampler, GaussianCropConfig):
        tx = draw_offset(h, sigma * h, rng, cfg.sampler.max_rejections)
        ty = draw_offset(w, sigma * w, rng, cfg.sampler.max_rejections)
    else:
        tx = draw_uniform_offset(cfg.sampler.range_r, rng)
        ty = draw_uniform_offset(cfg.sampler.range_r, rng)
    cropped = pad_and_crop(image, CropWindow(tx, ty, w, h))
    return cropped, visibility(tx, ty, w, h)


def train(dataset: LabeledDataset, cfg: TrainConfig) -> tuple[MlpClassifier, list[EpochStats]]:
    """SGD with momentum, decoupled weight decay, and cosine lr.

    Each sample is flipped with probability 1/2, translated by the
    configured crop sampler over zero padding, and its target softened
    by the visibility of the crop under cfg.policy. With epochs == 0
    the initialized model is returned untouched. Fixed seed implies a
    bit-identical model and log.
    """
    n = len(dataset)
    if n == 0:
        raise ValueError("cannot train on an empty dataset")
    _, c, h, w = dataset.images.shape
    if h != w:
        raise ValueError(f"same-size crop training expects square images, got {h}x{w}")
    if isinstance(cfg.sampler, GaussianCropConfig) and cfg.sampler.length != h:
        raise ValueError(f"sampler length {cfg.sampler.length} != image edge {h}")
    if isinstance(cfg.sampler, UniformCropConfig) and cfg.sampler.range_r > h:
        raise ValueError(f"offset range {cfg.sampler.range_r} exceeds image edge {h}")

    layer_sizes = (c * h * w, *cfg.hidden_sizes, dataset.num_classes)
    root = RandomSource(cfg.seed)
    model = init_mlp(layer_sizes, root.split(0))
    velocity_w = [np.zeros_like(wt) for wt in model.weights]
    velocity_b = [np.zeros_like(bs) for bs in model.biases]
    mode = "hard" if cfg.policy.mode == "none" else cfg.policy.mode

    stats: list[EpochStats] = []
    for epoch in range(cfg.epochs):
        lr = cosine_lr(epoch, cfg.epochs, cfg.lr0)
        sigma = effective_sigma(epoch, cfg)
        # one stream per epoch, consumed in a fixed order: permutation
        # first, then flip and crop draws sample by sample
        ep_rng = root.split(epoch + 1)
        order = ep_rng.generator.permutation(n)
        loss_sum = 0.0
        wrong = 0
        for batch_index, start in enumerate(range(0, n, cfg.batch_size)):
            idx = order[start : start + cfg.batch_size]
            batch = np.empty((idx.size, c * h * w))
            ps = np.empty(idx.size)
            for row, i in enumerate(idx):
                image, vis = _augment(dataset.images[i], cfg, sigma, ep_rng)
                batch[row] = image.reshape(-1)
                if mode == "hard":
                    ps[row] = 1.0
                elif cfg.fixed_alpha is not None:
                    ps[row] = label_smoothing_confidence(cfg.fixed_alpha)
                else:
                    ps[row] = soften(vis, cfg.policy)
            labels = dataset.labels[idx]
            loss, grad_w, grad_b, logits = _backward_batch(model, batch, labels, ps, mode)
            finite = math.isfinite(loss) and all(
                np.isfinite(g).all() for g in grad_w + grad_b
            )
            if not finite:
                raise NonFiniteLossError(epoch, batch_index, lr)
            wrong += int((logits.argmax(axis=1) != labels).sum())
            loss_sum += loss * idx.size
            for layer in range(model.num_layers):
                velocity_w[layer] = cfg.momentum * velocity_w[layer] + grad_w[layer]
                velocity_b[layer] = cfg.momentum * velocity_b[layer] + grad_b[layer]
                if cfg.weight_decay:
                    model.weights[layer] *= 1.0 - lr * cfg.weight_decay
                model.weights[layer] -= lr * velocity_w[layer]
                model.biases[layer] -= lr * velocity_b[layer]
        stats.append(EpochStats(epoch, loss_sum / n, wrong / n, lr, sigma))
    return model, stats


def save_checkpoint(model: MlpClassifier, path: str) -> None:
    """Write magic, version, layer sizes, then per layer the row-major
    weight matrix and bias vector as little-endian float64."""
    header = struct.pack("<8sII", _CHECKPOINT_MAGIC, 1, len(model.layer_sizes))
    header += struct.pack(f"<{len(model.layer_sizes)}I", *model.layer_sizes)
    with open(path, "wb") as fh:
        fh.write(header)
        for w, b in zip(model.weights, model.biases):
            fh.write(w.astype("<f8").tobytes(order="C"))
            fh.write(b.astype("<f8").tobytes())


def load_checkpoint(path: str) -> MlpClassifier:
    """Read a checkpoint written by :func:`save_checkpoint`."""
    with open(path, "rb") as fh:
        data = fh.read()
    fixed = struct.calcsize("<8sII")
    if len(data) < fixed:
        raise CheckpointError(f"checkpoint too short: {len(data)} bytes")
    magic, version, n_sizes = struct.unpack("<8sII", data[:fixed])
    if magic != _CHECKPOINT_MAGIC:
        raise CheckpointError(f"bad magic {magic!r}")
    if version != 1:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    if n_sizes < 2:
        raise CheckpointError(f"need >= 2 layer sizes, got {n_sizes}")
    offset = fixed + 4 * n_sizes
    if len(data) < offset:
        raise CheckpointError("checkpoint truncated in the size table")
    sizes = struct.unpack(f"<{n_sizes}I", data[fixed:offset])
    if any(s < 1 for s in sizes):
        raise CheckpointError(f"layer sizes must be positive, got {sizes}")
    expected = offset + 8 * sum(
        sizes[i + 1] * sizes[i] + sizes[i + 1] for i in range(n_sizes - 1)
    )
    if len(data) != expected:
        raise CheckpointError(f"checkpoint length {len(data)} != expected {expected}")
    weights, biases = [], []
    for i in range(n_sizes - 1):
        fan_out, fan_in = sizes[i + 1], sizes[i]
        w = np.frombuffer(data, dtype="<f8", count=fan_out * fan_in, offset=offset)
        offset += 8 * fan_out * fan_in
        b = np.frombuffer(data, dtype="<f8", count=fan_out, offset=offset)
        offset += 8 * fan_out
        weights.append(w.reshape(fan_out, fan_in).copy())
        biases.append(b.copy())
    return MlpClassifier(tuple(sizes), weights, biases)
