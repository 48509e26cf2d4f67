"""Softened classification losses with analytic gradients.

Every mode is the KL divergence from a target distribution to the
model's softmax, times a scalar sample weight:

    loss = w * KL(target || softmax(logits))

    hard               target = one-hot,  w = 1   (plain cross entropy
                                                   up to the constant
                                                   target entropy, which
                                                   is 0 for one-hot)
    target             target = soft,     w = 1
    weight             target = one-hot,  w = p
    target_and_weight  target = soft,     w = p

where the soft target puts p on the true class and spreads the rest
evenly. Because the modes share one formula, the identities
weight = p * hard and target_and_weight = p * target hold exactly in
floating point, and the gradient is always w * (softmax - target).
"""

from __future__ import annotations

import numpy as np

LOSS_MODES = ("hard", "target", "weight", "target_and_weight")


def log_softmax(logits: np.ndarray) -> np.ndarray:
    """Log-probabilities via the log-sum-exp trick.

    Never computed as log(softmax(x)): subtracting the max keeps every
    exponent <= 0, so the result is finite for any finite logits.
    """
    z = np.asarray(logits, dtype=float)
    if z.ndim != 1 or z.size < 2:
        raise ValueError(f"expected a 1-d logit vector with >= 2 entries, got shape {z.shape}")
    shifted = z - z.max()
    return shifted - np.log(np.exp(shifted).sum())


def softmax(logits: np.ndarray) -> np.ndarray:
    z = np.asarray(logits, dtype=float)
    e = np.exp(z - z.max())
    return e / e.sum()


def make_soft_target(true_class: int, p: float, num_classes: int) -> np.ndarray:
    """Distribution with p on the true class, (1-p)/(N-1) on the others.

    ``p`` must lie in [1/N, 1]; at p = 1/N the target is uniform and at
    p = 1 it is one-hot.
    """
    if num_classes < 2:
        raise ValueError(f"need at least 2 classes, got {num_classes}")
    if not 0 <= true_class < num_classes:
        raise ValueError(f"true_class {true_class} out of range for {num_classes} classes")
    if p < 1.0 / num_classes or p > 1.0:
        raise ValueError(f"confidence {p} outside [1/{num_classes}, 1]")
    target = np.full(num_classes, (1.0 - p) / (num_classes - 1))
    target[true_class] = p
    return target


def _target_and_weight(true_class: int, p: float, num_classes: int,
                       mode: str) -> tuple[np.ndarray, float]:
    if mode not in LOSS_MODES:
        raise ValueError(f"mode must be one of {LOSS_MODES}, got {mode!r}")
    if mode in ("hard", "weight"):
        if num_classes < 2:
            raise ValueError(f"need at least 2 classes, got {num_classes}")
        if not 0 <= true_class < num_classes:
            raise ValueError(f"true_class {true_class} out of range for {num_classes} classes")
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"confidence {p} outside [0, 1]")
        target = np.zeros(num_classes)
        target[true_class] = 1.0
    else:
        target = make_soft_target(true_class, p, num_classes)
    weight = 1.0 if mode in ("hard", "target") else p
    return target, weight


def _kl_to_softmax(target: np.ndarray, logits: np.ndarray) -> float:
    logq = log_softmax(logits)
    mask = target > 0
    safe = np.where(mask, target, 1.0)
    kl = float(np.sum(np.where(mask, target * (np.log(safe) - logq), 0.0)))
    # KL >= 0 mathematically; clamp the roundoff tail when q == target
    return kl if kl > 0.0 else 0.0


def soft_loss(logits: np.ndarray, true_class: int, p: float, mode: str) -> float:
    """Weighted KL loss of one sample under the given mode.

    Zero target entries contribute exactly zero (0 * log 0 == 0), so
    hard mode reduces to -log softmax(logits)[true_class].
    """
    target, weight = _target_and_weight(true_class, p, np.asarray(logits).size, mode)
    return weight * _kl_to_softmax(target, logits)


def soft_loss_grad(logits: np.ndarray, true_class: int, p: float, mode: str) -> np.ndarray:
    """d loss / d logits = weight * (softmax(logits) - target)."""
    target, weight = _target_and_weight(true_class, p, np.asarray(logits).size, mode)
    return weight * (softmax(logits) - target)


def batch_loss(samples: list[tuple[np.ndarray, int, float]], mode: str) -> float:
    """Mean per-sample loss over (logits, true_class, confidence) triples.

    Summed in list order, so the reduction is deterministic. Any
    per-sample weighting lives inside the individual loss terms.
    """
    if not samples:
        raise ValueError("cannot average a loss over an empty batch")
    total = 0.0
    for logits, true_class, p in samples:
        total += soft_loss(logits, int(true_class), float(p), mode)
    return total / len(samples)
