"""Coloured-glove hand-state heuristic.

The subject wears gloves that are green on the palm and red on the back.
Counting the dominant colour inside a crop around each tracked hand gives
a crude wrist-yaw signal and a "palm facing up" flag.

Images are ``(height, width, 3)`` uint8 arrays in RGB order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from PIL import Image

from .exceptions import ConfigurationError, RecordingFormatError, ValidationError

CHROMA_MARGIN = 40


class Side(str, Enum):
    PALM = "palm"
    BACK = "back"


@dataclass(frozen=True)
class GloveReading:
    palm_pixels: int
    back_pixels: int

    @property
    def max(self) -> int:
        return max(self.palm_pixels, self.back_pixels)

    @property
    def dominant(self) -> Side:
        # ties go to the palm
        return Side.PALM if self.palm_pixels >= self.back_pixels else Side.BACK

    @property
    def palm_only(self) -> bool:
        return self.back_pixels == 0 and self.palm_pixels > 0


NEUTRAL_READING = GloveReading(0, 0)


def as_rgb_image(image) -> np.ndarray:
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValidationError(f"expected an (H, W, 3) RGB image, got shape {arr.shape}")
    if arr.dtype != np.uint8:
        if arr.size and (arr.min() < 0 or arr.max() > 255):
            raise ValidationError("pixel values must lie in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def extract_hand_subimage(image, hand_px, window: int) -> np.ndarray:
    """Square crop of side ``window`` centred on ``hand_px = (col, row)``.

    The crop is clipped to the image, so it shrinks near the borders.
    """
    image = as_rgb_image(image)
    if window <= 0:
        raise ConfigurationError(f"window must be positive, got {window}")
    height, width = image.shape[:2]
    col, row = (int(round(c)) for c in hand_px)
    if not (0 <= col < width and 0 <= row < height):
        raise ValidationError(f"hand pixel {(col, row)} outside {width}x{height} image")
    half = window // 2
    r0, c0 = max(row - half, 0), max(col - half, 0)
    r1, c1 = min(row - half + window, height), min(col - half + window, width)
    return image[r0:r1, c0:c1].copy()


def classify_glove_pixels(sub) -> GloveReading:
    """Count green (palm) and red (back) pixels in a hand crop.

    A pixel is green when G exceeds both R and B by ``CHROMA_MARGIN``;
    red is defined symmetrically.
    """
    sub = as_rgb_image(sub).astype(np.int16)
    if sub.shape[0] == 0 or sub.shape[1] == 0:
        raise ValidationError("empty subimage")
    r, g, b = sub[..., 0], sub[..., 1], sub[..., 2]
    green = (g >= r + CHROMA_MARGIN) & (g >= b + CHROMA_MARGIN)
    red = (r >= g + CHROMA_MARGIN) & (r >= b + CHROMA_MARGIN)
    return GloveReading(int(green.sum()), int(red.sum()))


def wrist_yaw_from_reading(reading: GloveReading, n_norm: float, max_wrist_yaw: float) -> float:
    """Map a glove reading to a wrist yaw in ``[-max_wrist_yaw, max_wrist_yaw]``.

    Palm-dominant readings give ``max/N * max_wrist_yaw``; back-dominant ones
    give ``(max - N)/N * max_wrist_yaw``. Counts above ``n_norm`` saturate.
    """
    if not n_norm > 0:
        raise ConfigurationError(f"normalizing pixel count must be positive, got {n_norm}")
    m = min(float(reading.max), float(n_norm))
    if reading.dominant is Side.PALM:
        return m / n_norm * max_wrist_yaw
    return (m - n_norm) / n_norm * max_wrist_yaw


def read_ppm(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def write_ppm(image, path) -> None:
    Image.fromarray(as_rgb_image(image), mode="RGB").save(path, format="PPM")


def load_hand_sidecar(path, n_frames: int, window: int) -> list[tuple[GloveReading, GloveReading]]:
    """Read ``hands.jsonl`` into per-frame ``(left, right)`` readings.

    Each line is either ``{"frame": i, "left": crop.ppm, "right": crop.ppm}``
    with ready-made crops, or ``{"frame": i, "image": full.ppm, "left_px":
    [col, row], "right_px": [col, row]}`` to crop on the fly. Paths are
    relative to the sidecar. Frames without an entry get neutral readings.
    """
    path = Path(path)
    base = path.parent
    cache: dict[Path, np.ndarray] = {}

    def image_at(rel):
        p = base / rel
        if p not in cache:
            cache[p] = read_ppm(p)
        return cache[p]

    readings = [(NEUTRAL_READING, NEUTRAL_READING)] * n_frames
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                idx = int(obj["frame"])
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise RecordingFormatError("hand entry needs an integer 'frame'", line=lineno) from None
            if not 0 <= idx < n_frames:
                raise RecordingFormatError(f"frame index {idx} out of range", line=lineno)
            try:
                if "image" in obj:
                    full = image_at(obj["image"])
                    left = extract_hand_subimage(full, obj["left_px"], window)
                    right = extract_hand_subimage(full, obj["right_px"], window)
                else:
                    left, right = image_at(obj["left"]), image_at(obj["right"])
            except KeyError as exc:
                raise RecordingFormatError(f"hand entry missing key {exc}", line=lineno) from None
            readings[idx] = (classify_glove_pixels(left), classify_glove_pixels(right))
    return readings
