"""Human skeleton capture model and JSONL recording I/O.

Capture space is right-handed with ``z`` pointing away from the sensor,
``y`` up and ``x`` running left-to-right as seen by the sensor. A subject
facing the sensor therefore has their left shoulder at larger ``x`` than
their right one.

Recording file layout (UTF-8, one JSON object per line)::

    {"meta": {"fps": 30.0, "subject": "s01"}}
    {"t": 0.0, "joints": {"head": [x, y, z], ..., "right_foot": [x, y, z]}}
    ...
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    DegenerateGeometryError,
    FrameValidationError,
    RecordingFormatError,
    ValidationError,
)

JOINTS = (
    "head",
    "neck",
    "torso",
    "left_shoulder",
    "left_elbow",
    "left_hand",
    "right_shoulder",
    "right_elbow",
    "right_hand",
    "left_hip",
    "left_knee",
    "left_foot",
    "right_hip",
    "right_knee",
    "right_foot",
)
JOINT_INDEX = {name: i for i, name in enumerate(JOINTS)}

# Shorter vectors are treated as degenerate. Well below sensor noise
# (millimetres) but far above double rounding.
EPS = 1e-9


def as_vec3(value) -> np.ndarray:
    v = np.asarray(value, dtype=np.float64)
    if v.shape != (3,):
        raise ValidationError(f"expected 3 coordinates, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValidationError(f"non-finite coordinate in {v.tolist()}")
    return v


@dataclass
class SkeletonFrame:
    """One timestamped set of the 15 tracked joints."""

    t: float
    joints: dict[str, np.ndarray]

    def __post_init__(self):
        self.t = float(self.t)
        if not math.isfinite(self.t):
            raise ValidationError("timestamp must be finite")
        if len(self.joints) != len(JOINTS) or set(self.joints) != set(JOINTS):
            missing = sorted(set(JOINTS) - set(self.joints))
            extra = sorted(set(self.joints) - set(JOINTS))
            raise ValidationError(
                f"expected {len(JOINTS)} joints, got {len(self.joints)}"
                f" (missing={missing}, unexpected={extra})"
            )
        self.joints = {name: as_vec3(self.joints[name]) for name in JOINTS}

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self.joints[name]
        except KeyError:
            raise KeyError(f"unknown joint {name!r}; expected one of {JOINTS}") from None

    @classmethod
    def from_array(cls, t: float, positions) -> "SkeletonFrame":
        """Build a frame from a ``(15, 3)`` array in ``JOINTS`` order."""
        positions = np.asarray(positions, dtype=np.float64)
        if positions.shape != (len(JOINTS), 3):
            raise ValidationError(f"expected shape (15, 3), got {positions.shape}")
        return cls(t, {name: positions[i].copy() for i, name in enumerate(JOINTS)})

    def to_array(self) -> np.ndarray:
        return np.stack([self.joints[name] for name in JOINTS])


@dataclass
class Recording:
    frames: list[SkeletonFrame]
    fps: float
    subject: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.frames:
            raise ValidationError("a recording needs at least one frame")
        if not (self.fps > 0 and math.isfinite(self.fps)):
            raise ValidationError(f"frame rate must be positive, got {self.fps}")
        for i in range(1, len(self.frames)):
            if not self.frames[i].t > self.frames[i - 1].t:
                raise FrameValidationError(
                    f"timestamp {self.frames[i].t} does not increase", frame_index=i
                )

    def __len__(self):
        return len(self.frames)

    def __iter__(self):
        return iter(self.frames)

    def __getitem__(self, i):
        return self.frames[i]

    def to_array(self) -> np.ndarray:
        """Joint positions as an ``(n_frames, 15, 3)`` array."""
        return np.stack([f.to_array() for f in self.frames])

    @property
    def timestamps(self) -> np.ndarray:
        return np.array([f.t for f in self.frames])


def vector_between(frame: SkeletonFrame, start: str, end: str) -> np.ndarray:
    """Unnormalized vector pointing from joint ``start`` to joint ``end``."""
    return frame[end] - frame[start]


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(v))
    if not n > EPS:
        raise DegenerateGeometryError(f"cannot normalize vector of length {n:.3g}")
    return v / n


def save_recording(recording: Recording, path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        meta = {"fps": float(recording.fps), "subject": recording.subject, **recording.meta}
        fh.write(json.dumps({"meta": meta}) + "\n")
        for frame in recording.frames:
            joints = {name: frame.joints[name].tolist() for name in JOINTS}
            fh.write(json.dumps({"t": frame.t, "joints": joints}) + "\n")


def load_recording(path) -> Recording:
    """Parse a JSONL recording, validating every frame.

    Raises ``RecordingFormatError`` (with the 1-based line number) for
    malformed lines and ``FrameValidationError`` (with the 0-based frame
    index) for frames that break the skeleton invariants.
    """
    path = Path(path)
    meta = None
    frames: list[SkeletonFrame] = []
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordingFormatError(f"invalid JSON ({exc.msg})", line=lineno) from None
            if not isinstance(obj, dict):
                raise RecordingFormatError("expected a JSON object", line=lineno)
            if meta is None:
                if "meta" not in obj or not isinstance(obj["meta"], dict):
                    raise RecordingFormatError("first line must be the meta header", line=lineno)
                meta = dict(obj["meta"])
                continue
            if "t" not in obj or "joints" not in obj or not isinstance(obj["joints"], dict):
                raise RecordingFormatError("frame needs 't' and 'joints'", line=lineno)
            try:
                frames.append(SkeletonFrame(obj["t"], obj["joints"]))
            except (ValidationError, TypeError) as exc:
                raise FrameValidationError(str(exc), frame_index=len(frames)) from None
    if meta is None:
        raise RecordingFormatError("empty file", line=1)
    try:
        fps = float(meta.pop("fps"))
    except (KeyError, TypeError, ValueError):
        raise RecordingFormatError("meta header needs a numeric 'fps'", line=1) from None
    subject = str(meta.pop("subject", ""))
    return Recording(frames, fps=fps, subject=subject, meta=meta)
