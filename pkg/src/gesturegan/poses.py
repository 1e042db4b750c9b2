"""Robot pose channels, joint limits and the pose-stream file format.

A pose is a length-14 float vector in ``CHANNELS`` order. Pose streams
are JSONL files with one ``{"t": seconds, "q": [14 floats]}`` per line.
"""

from __future__ import annotations

import json
import math
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

import numpy as np

from .exceptions import ConfigurationError, RecordingFormatError, ValidationError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ARM_CHANNELS = ("shoulder_pitch", "shoulder_roll", "elbow_yaw", "elbow_roll", "wrist_yaw", "hand")
CHANNELS = (
    ("head_yaw", "head_pitch")
    + tuple(f"l_{c}" for c in ARM_CHANNELS)
    + tuple(f"r_{c}" for c in ARM_CHANNELS)
)
N_CHANNELS = len(CHANNELS)
CHANNEL_INDEX = {name: i for i, name in enumerate(CHANNELS)}

# Channels whose sign flips between the left and right arm.
MIRRORED = ("shoulder_roll", "elbow_yaw", "elbow_roll", "wrist_yaw")


def arm_channel(side: str, name: str) -> int:
    return CHANNEL_INDEX[f"{side[0]}_{name}"]


@dataclass(frozen=True)
class JointLimits:
    """Per-channel intervals plus the gains and glove calibration.

    ``n_norm=None`` means "half the crop area" (``window**2 / 2``).
    """

    lower: tuple
    upper: tuple
    k1: float = 1.0
    k2: float = 0.2
    max_wrist_yaw: float = 1.8239
    palm_up_elbow_yaw: float = -math.pi / 2
    window: int = 32
    n_norm: float | None = None
    seed: int = 0
    calibration_frames: int = 10

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != N_CHANNELS or len(upper) != N_CHANNELS:
            raise ConfigurationError(f"need {N_CHANNELS} limits per side")
        for name, lo, hi in zip(CHANNELS, lower, upper):
            if not lo < hi:
                raise ConfigurationError(f"{name}: min {lo} must be below max {hi}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if self.window <= 0:
            raise ConfigurationError(f"window must be positive, got {self.window}")
        if self.n_norm is not None and not self.n_norm > 0:
            raise ConfigurationError(f"n must be positive, got {self.n_norm}")
        if self.calibration_frames < 0:
            raise ConfigurationError("calibration_frames must be >= 0")

    @property
    def lo(self) -> np.ndarray:
        return np.array(self.lower)

    @property
    def hi(self) -> np.ndarray:
        return np.array(self.upper)

    @property
    def normalizer(self) -> float:
        return self.n_norm if self.n_norm is not None else self.window**2 * 0.5

    def bounds(self, channel: str) -> tuple[float, float]:
        i = CHANNEL_INDEX[channel]
        return self.lower[i], self.upper[i]

    def clip(self, q) -> np.ndarray:
        return np.clip(np.asarray(q, dtype=np.float64), self.lo, self.hi)

    def clip_channel(self, channel: str, value: float) -> float:
        lo, hi = self.bounds(channel)
        return min(max(value, lo), hi)

    def contains(self, q) -> bool:
        q = np.asarray(q)
        return bool(np.all((q >= self.lo) & (q <= self.hi)))

    def rest_pose(self) -> np.ndarray:
        return self.clip(np.zeros(N_CHANNELS))

    def with_(self, **changes) -> "JointLimits":
        return replace(self, **changes)

    @classmethod
    def from_dict(cls, cfg: dict) -> "JointLimits":
        joints = cfg.get("joints", {})
        missing = [c for c in CHANNELS if c not in joints]
        if missing:
            raise ConfigurationError(f"limits config missing joints: {missing}")
        unknown = sorted(set(joints) - set(CHANNELS))
        if unknown:
            raise ConfigurationError(f"unknown joints in limits config: {unknown}")
        gains, glove, session = cfg.get("gains", {}), cfg.get("glove", {}), cfg.get("session", {})
        kwargs = dict(
            lower=[joints[c][0] for c in CHANNELS],
            upper=[joints[c][1] for c in CHANNELS],
        )
        for key, section, name in [
            ("k1", gains, "k1"),
            ("k2", gains, "k2"),
            ("max_wrist_yaw", glove, "max_wrist_yaw"),
            ("palm_up_elbow_yaw", glove, "palm_up_elbow_yaw"),
            ("window", glove, "window"),
            ("n_norm", glove, "n"),
            ("seed", session, "seed"),
            ("calibration_frames", session, "calibration_frames"),
        ]:
            if name in section:
                kwargs[key] = section[name]
        return cls(**kwargs)

    @classmethod
    def from_toml(cls, path) -> "JointLimits":
        with open(path, "rb") as fh:
            try:
                cfg = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigurationError(f"{path}: {exc}") from None
        return cls.from_dict(cfg)

    @classmethod
    def default(cls) -> "JointLimits":
        text = resources.files("gesturegan").joinpath("data/pepper.toml").read_text()
        return cls.from_dict(tomllib.loads(text))


def load_limits(path=None) -> JointLimits:
    return JointLimits.default() if path is None else JointLimits.from_toml(path)


def write_pose_stream(path, t, q) -> None:
    t = np.asarray(t, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if q.ndim != 2 or q.shape[1] != N_CHANNELS or len(t) != len(q):
        raise ValidationError(f"expected {len(t)} poses of {N_CHANNELS} channels, got {q.shape}")
    with Path(path).open("w", encoding="utf-8") as fh:
        for ti, qi in zip(t.tolist(), q.tolist()):
            fh.write(json.dumps({"t": ti, "q": qi}) + "\n")


def read_pose_stream(path) -> tuple[np.ndarray, np.ndarray]:
    times, poses = [], []
    with Path(path).open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                t, q = float(obj["t"]), [float(v) for v in obj["q"]]
            except (json.JSONDecodeError, KeyError, TypeError, ValueError):
                raise RecordingFormatError("expected {\"t\": float, \"q\": [floats]}", line=lineno) from None
            if len(q) != N_CHANNELS:
                raise RecordingFormatError(f"pose has {len(q)} channels, expected {N_CHANNELS}", line=lineno)
            times.append(t)
            poses.append(q)
    return np.array(times, dtype=np.float64), np.array(poses, dtype=np.float64).reshape(-1, N_CHANNELS)
