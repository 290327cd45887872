"""Line-image preprocessing: value-channel extraction, inversion, contrast
stretch between intensity percentiles, optional resize-and-pad.

The value channel of HSV is the per-pixel maximum over R, G and B, which
makes red ruling lines on white paper indistinguishable from the paper
itself — both map to 255 — so they vanish before the network ever sees
them.  The channel is then inverted (ink becomes bright) and linearly
stretched so the 2nd percentile lands at 0 and the 98th at 255.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from PIL import Image

from .errors import DegenerateRangeWarning


@dataclass(frozen=True)
class PreprocessConfig:
    low_percentile: float = 2.0
    high_percentile: float = 98.0
    # width, height fed to the recognition model; None skips resizing
    target_size: tuple[int, int] | None = (1024, 128)
    pad_value: int = 0

    def __post_init__(self):
        if not 0 <= self.low_percentile < self.high_percentile <= 100:
            raise ValueError(
                f"percentiles must satisfy 0 <= low < high <= 100, got "
                f"{self.low_percentile}/{self.high_percentile}")


def value_channel(img) -> np.ndarray:
    """Max over the colour channels (the V of HSV), as uint8 (H, W)."""
    arr = np.asarray(img)
    if arr.ndim == 2:
        return arr.astype(np.uint8)
    if arr.ndim == 3:
        return arr[..., :3].max(axis=2).astype(np.uint8)
    raise ValueError(f"expected (H, W) or (H, W, C) pixels, got shape {arr.shape}")


def nearest_rank(values: np.ndarray, percentile: float) -> int:
    """Nearest-rank percentile of a flattened channel."""
    flat = np.sort(values, axis=None)
    rank = max(1, math.ceil(percentile / 100.0 * flat.size))
    return int(flat[rank - 1])


def stretch_contrast(channel: np.ndarray, low: float = 2.0, high: float = 98.0) -> np.ndarray:
    """Map the low percentile to 0 and the high to 255, clamping outside.

    A degenerate range (both percentiles equal, e.g. a constant image)
    yields an all-zero image and a DegenerateRangeWarning instead of a
    division fault.
    """
    channel = np.asarray(channel, dtype=np.float64)
    lo = nearest_rank(channel, low)
    hi = nearest_rank(channel, high)
    if lo == hi:
        warnings.warn(f"contrast range degenerate (both percentiles = {lo}); "
                      "output forced to zero", DegenerateRangeWarning, stacklevel=2)
        return np.zeros(channel.shape, dtype=np.uint8)
    out = (channel - lo) * (255.0 / (hi - lo))
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def resize_pad(channel: np.ndarray, size: tuple[int, int], pad_value: int = 0) -> np.ndarray:
    """Aspect-preserving resize into (width, height), padding the remainder."""
    width, height = size
    h, w = channel.shape
    scale = min(width / w, height / h)
    new_w = max(1, min(width, round(w * scale)))
    new_h = max(1, min(height, round(h * scale)))
    img = Image.fromarray(channel).resize((new_w, new_h), Image.BILINEAR)
    out = np.full((height, width), pad_value, dtype=np.uint8)
    out[:new_h, :new_w] = np.asarray(img)
    return out


def preprocess(img, cfg: PreprocessConfig = PreprocessConfig()) -> np.ndarray:
    """RGB (or grayscale) line crop -> single-channel model input."""
    channel = value_channel(img)
    inverted = 255 - channel
    stretched = stretch_contrast(inverted, cfg.low_percentile, cfg.high_percentile)
    if cfg.target_size is not None:
        stretched = resize_pad(stretched, cfg.target_size, cfg.pad_value)
    return stretched


def load_image(path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"))


def save_png(path, channel: np.ndarray) -> None:
    Image.fromarray(np.asarray(channel, dtype=np.uint8)).save(path, format="PNG")
