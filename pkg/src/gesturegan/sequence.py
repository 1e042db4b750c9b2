"""Turn generated units of movement into a timed gesture sequence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import POSES_PER_UM, UM_SIZE, unpack_ums
from .exceptions import ConfigurationError, ValidationError
from .poses import N_CHANNELS, read_pose_stream, write_pose_stream

DEFAULT_FRAME_PERIOD = 0.25
DEFAULT_BLEND = 2


@dataclass
class GestureSequence:
    poses: np.ndarray  # (n, 14)
    frame_period: float = DEFAULT_FRAME_PERIOD

    def __post_init__(self):
        self.poses = np.asarray(self.poses, dtype=np.float64).reshape(-1, N_CHANNELS)
        if not self.frame_period > 0:
            raise ConfigurationError(f"frame_period must be positive, got {self.frame_period}")

    def __len__(self):
        return len(self.poses)

    @property
    def timestamps(self) -> np.ndarray:
        return np.arange(len(self.poses)) * self.frame_period

    @property
    def duration(self) -> float:
        return len(self.poses) * self.frame_period


def ums_needed(duration: float, frame_period: float = DEFAULT_FRAME_PERIOD) -> int:
    """Units of movement needed to cover ``duration`` seconds (rounded up).

    A ratio within 1e-9 above an integer counts as that integer, so decimal
    inputs such as 1.2 s at 0.3 s/pose are not bumped by float rounding.
    """
    if duration < 0:
        raise ConfigurationError("duration must be >= 0")
    if not frame_period > 0:
        raise ConfigurationError("frame_period must be positive")
    ratio = duration / (POSES_PER_UM * frame_period)
    return max(0, math.ceil(ratio - 1e-9))


def assemble(ums, frame_period: float = DEFAULT_FRAME_PERIOD, blend: int = DEFAULT_BLEND) -> GestureSequence:
    """Concatenate UMs, inserting ``blend`` linearly interpolated poses at
    each seam. Output length is ``4 n + blend (n - 1)``."""
    ums = np.asarray(ums, dtype=np.float64)
    if ums.ndim != 2 or ums.shape[1] != UM_SIZE or len(ums) == 0:
        raise ValidationError(f"expected a non-empty (n, {UM_SIZE}) array, got {ums.shape}")
    if blend < 0:
        raise ConfigurationError("blend must be >= 0")
    blocks = [unpack_ums(u) for u in ums]
    weights = (np.arange(1, blend + 1) / (blend + 1))[:, None]
    out = [blocks[0]]
    for prev, nxt in zip(blocks, blocks[1:]):
        if blend:
            a, b = prev[-1], nxt[0]
            out.append(a + (b - a) * weights)
        out.append(nxt)
    return GestureSequence(np.concatenate(out), frame_period)


def export_sequence(seq: GestureSequence, path) -> None:
    write_pose_stream(path, seq.timestamps, seq.poses)


def load_sequence(path) -> GestureSequence:
    t, q = read_pose_stream(path)
    if len(t) == 0:
        raise ValidationError(f"{path}: empty pose stream")
    period = float(t[1] - t[0]) if len(t) > 1 else DEFAULT_FRAME_PERIOD
    return GestureSequence(q, period)


_SHADES = " .:-=+*#%@"


def ascii_timeline(seq: GestureSequence, limits, names, width: int = 72) -> str:
    """One row per channel; each column shows the channel's position
    within its joint range as a shade character."""
    n = len(seq)
    cols = np.linspace(0, n - 1, min(width, n)).round().astype(int) if n else np.array([], int)
    lo, hi = limits.lo, limits.hi
    frac = (seq.poses[cols] - lo) / (hi - lo)
    idx = np.clip((frac * (len(_SHADES) - 1)).round().astype(int), 0, len(_SHADES) - 1)
    pad = max(len(nm) for nm in names)
    lines = [f"{'t[s]'.rjust(pad)} | 0 .. {seq.duration:.2f}"]
    for c, name in enumerate(names):
        lines.append(f"{name.rjust(pad)} |" + "".join(_SHADES[i] for i in idx[:, c]))
    return "\n".join(lines)
