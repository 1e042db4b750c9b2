"""Units of movement: windowing pose streams and scaling them to [-1, 1].

A unit of movement (UM) is four consecutive poses flattened pose-major
into a 56-vector, so value ``p * 14 + c`` is channel ``c`` of pose ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from ._binio import read_blob, write_blob
from .exceptions import ConfigurationError, ValidationError
from .poses import CHANNELS, N_CHANNELS, JointLimits

POSES_PER_UM = 4
UM_SIZE = POSES_PER_UM * N_CHANNELS
CORPUS_FORMAT = "gesturegan.corpus"
CORPUS_VERSION = 1


def window_poses(poses, stride: int = POSES_PER_UM) -> np.ndarray:
    """Slide a 4-pose window over ``poses`` (``(n, 14)``) with ``stride``.

    Returns ``(m, 56)`` with ``m = (n - 4) // stride + 1``, or an empty
    ``(0, 56)`` array when fewer than four poses are given.
    """
    if stride < 1:
        raise ConfigurationError(f"stride must be >= 1, got {stride}")
    poses = np.asarray(poses, dtype=np.float64).reshape(-1, N_CHANNELS)
    n = len(poses)
    if n < POSES_PER_UM:
        return np.empty((0, UM_SIZE))
    starts = np.arange(0, n - POSES_PER_UM + 1, stride)
    idx = starts[:, None] + np.arange(POSES_PER_UM)[None, :]
    return poses[idx].reshape(len(starts), UM_SIZE)


def unpack_ums(ums) -> np.ndarray:
    """``(m, 56)`` UMs back to ``(4 m, 14)`` poses."""
    return np.asarray(ums, dtype=np.float64).reshape(-1, N_CHANNELS)


@dataclass(frozen=True)
class NormalizationSpec:
    """Per-channel ``(lo, hi)`` bounds mapped affinely onto ``[-1, 1]``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != N_CHANNELS or len(hi) != N_CHANNELS:
            raise ConfigurationError(f"need {N_CHANNELS} bounds per side")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ConfigurationError("every channel needs lo < hi")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def from_limits(cls, limits: JointLimits) -> "NormalizationSpec":
        return cls(limits.lower, limits.upper)

    def tiled(self):
        lo = np.tile(self.lo, POSES_PER_UM)
        hi = np.tile(self.hi, POSES_PER_UM)
        return lo, hi

    def to_dict(self) -> dict:
        return {"channels": list(CHANNELS), "lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_dict(cls, d: dict) -> "NormalizationSpec":
        return cls(d["lo"], d["hi"])


def normalize_um(ums, norm: NormalizationSpec) -> np.ndarray:
    """Clamp to ``[lo, hi]`` per channel then map ``lo -> -1``, ``hi -> +1``."""
    ums = np.asarray(ums, dtype=np.float64)
    lo, hi = norm.tiled()
    x = np.clip(ums, lo, hi)
    # this form hits -1 and +1 exactly at lo and hi
    return np.clip(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0)


def denormalize_um(ums, norm: NormalizationSpec) -> np.ndarray:
    ums = np.asarray(ums, dtype=np.float64)
    lo, hi = norm.tiled()
    # clip guards against the last-ulp overshoot of lo + (hi - lo)
    return np.clip((lo + hi) / 2.0 + ums * ((hi - lo) / 2.0), lo, hi)


class UnitScaler(TransformerMixin, BaseEstimator):
    """Scale UMs into ``[-1, 1]`` using joint-limit bounds.

    The bounds are configuration, not statistics: ``fit`` only records
    them, so any generator output in ``[-1, 1]`` decodes to a legal pose.
    """

    def __init__(self, limits=None):
        self.limits = limits

    def fit(self, X=None, y=None):
        limits = self.limits if self.limits is not None else JointLimits.default()
        self.norm_ = NormalizationSpec.from_limits(limits)
        self.n_features_in_ = UM_SIZE
        return self

    def transform(self, X):
        check_is_fitted(self, "norm_")
        X = check_array(X, dtype=np.float64, ensure_min_samples=0)
        if X.shape[1] != UM_SIZE:
            raise ValidationError(f"expected {UM_SIZE} features, got {X.shape[1]}")
        return normalize_um(X, self.norm_)

    def inverse_transform(self, X):
        check_is_fitted(self, "norm_")
        X = check_array(X, dtype=np.float64, ensure_min_samples=0)
        return denormalize_um(X, self.norm_)


@dataclass
class Corpus:
    ums: np.ndarray
    norm: NormalizationSpec
    provenance: list = field(default_factory=list)

    def __post_init__(self):
        self.ums = np.asarray(self.ums, dtype=np.float64).reshape(-1, UM_SIZE)
        if self.ums.size and (self.ums.min() < -1.0 or self.ums.max() > 1.0):
            raise ValidationError("corpus UMs must be normalized to [-1, 1]")

    def __len__(self):
        return len(self.ums)


def build_corpus(streams, norm: NormalizationSpec, stride: int = POSES_PER_UM) -> Corpus:
    """Window and normalize several pose streams.

    ``streams`` maps a recording id to its ``(n, 14)`` poses. Windows never
    straddle two recordings; output is ordered by recording id.
    """
    blocks, ids = [], []
    for rid in sorted(streams):
        blocks.append(normalize_um(window_poses(streams[rid], stride), norm))
        ids.append(rid)
    ums = np.concatenate(blocks) if blocks else np.empty((0, UM_SIZE))
    return Corpus(ums, norm, ids)


def save_corpus(corpus: Corpus, path) -> None:
    header = {
        "format": CORPUS_FORMAT,
        "version": CORPUS_VERSION,
        "count": len(corpus),
        "um_shape": [POSES_PER_UM, N_CHANNELS],
        "norm": corpus.norm.to_dict(),
        "provenance": list(corpus.provenance),
    }
    write_blob(path, header, corpus.ums)


def load_corpus(path) -> Corpus:
    header, payload = read_blob(path)
    if header.get("format") != CORPUS_FORMAT:
        raise ValidationError(f"{path}: not a corpus file")
    if header.get("version") != CORPUS_VERSION:
        raise ValidationError(f"{path}: unsupported corpus version {header.get('version')}")
    if header["norm"].get("channels") != list(CHANNELS):
        raise ValidationError(f"{path}: channel order does not match this build")
    ums = payload.reshape(header["count"], UM_SIZE)
    return Corpus(ums, NormalizationSpec.from_dict(header["norm"]), header.get("provenance", []))
