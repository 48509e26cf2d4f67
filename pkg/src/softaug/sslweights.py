"""Loss weights for self-supervised crop pairs.

A positive pair is two crop windows of the same source image. The
overlap (IoU) of the pair maps through the softening curve to a loss
weight, under either of two opposing hypotheses about which pairs are
easy, and weights are normalized per batch so their mean stays 1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .geometry import CropWindow, crop_visibility, iou
from .softening import SofteningPolicy, normalize_batch_weights, ssl_pair_confidence


@dataclass(frozen=True)
class CropPair:
    """Two crop windows over one width x height source image.

    Both windows must actually intersect the image; the IoU is taken
    between the windows themselves, in source-image coordinates.
    """

    first: CropWindow
    second: CropWindow
    width: int
    height: int

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValueError(f"image sides must be >= 1, got {self.width}x{self.height}")
        for name in ("first", "second"):
            window = getattr(self, name)
            if crop_visibility(window, self.width, self.height) == 0.0:
                raise ValueError(f"{name} window {window} lies outside the image")

    def overlap(self) -> float:
        return iou(self.first, self.second)


def pair_weights(pairs: list[CropPair], policy: SofteningPolicy, hypothesis: str,
                 normalize: bool = True) -> list[float]:
    """Per-pair loss weights for a batch of positive pairs.

    Raw weights come from the softening curve applied to each pair's
    IoU; with ``normalize`` they are rescaled to mean 1 so the batch
    keeps its overall gradient scale.
    """
    if not pairs:
        raise ValueError("cannot weight an empty batch of pairs")
    weights = [ssl_pair_confidence(pair.overlap(), policy, hypothesis) for pair in pairs]
    if normalize:
        weights = normalize_batch_weights(weights)
    return weights
