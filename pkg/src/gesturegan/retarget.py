"""Direct-kinematics mapping from a tracked skeleton to robot joint angles.

All formulas work on vectors expressed in a body-aligned frame obtained
from capture space by a fixed rotation: ``x`` towards the subject's left,
``y`` towards the subject's front (the sensor), ``z`` up. In that frame a
lowered arm has a negative vertical component and a horizontal arm a zero
one, which is what the shoulder-pitch formula expects.

Per-joint functions raise :class:`DegenerateGeometryError` when a limb
vector collapses; :func:`retarget_frame` turns that into "hold the
previous value" (or the rest pose on the first frame).
"""

from __future__ import annotations

import functools
import math

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import DegenerateGeometryError, ValidationError
from .glove import NEUTRAL_READING, GloveReading, wrist_yaw_from_reading
from .poses import CHANNEL_INDEX, N_CHANNELS, JointLimits, arm_channel
from .skeleton import EPS, Recording, SkeletonFrame, normalize, vector_between

HALF_PI = math.pi / 2
SIDES = ("left", "right")


@functools.lru_cache(maxsize=1)
def default_limits() -> JointLimits:
    return JointLimits.default()


def to_body(v) -> np.ndarray:
    """Rotate a capture-space vector into the body-aligned frame."""
    x, y, z = v
    return np.array([x, -z, y])


def rotate_x(v, angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    x, y, z = v
    return np.array([x, c * y - s * z, s * y + c * z])


def range_conv(theta: float) -> float:
    """Remap a human elbow-yaw angle to the robot convention.

    ``[pi/2, pi]`` goes to ``[-pi/2, 0]`` and ``[-pi, -pi/2]`` to ``[0, pi]``,
    both affinely; the open interval ``(-pi/2, pi/2)`` passes through.
    """
    theta = min(max(theta, -math.pi), math.pi)
    if theta >= HALF_PI:
        return theta - math.pi
    if theta <= -HALF_PI:
        return 2.0 * (theta + math.pi)
    return theta


def _side(side: str) -> str:
    if side not in SIDES:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return side


def _other(side: str) -> str:
    return "right" if side == "left" else "left"


def arm_vectors(frame: SkeletonFrame, side: str):
    """Body-frame shoulder-to-shoulder, upper-arm and forearm vectors.

    The shoulder-to-shoulder vector points from the opposite shoulder to
    this one, i.e. outward along the arm in a T-pose.
    """
    side = _side(side)
    rs = to_body(vector_between(frame, f"{_other(side)}_shoulder", f"{side}_shoulder"))
    se = to_body(vector_between(frame, f"{side}_shoulder", f"{side}_elbow"))
    eh = to_body(vector_between(frame, f"{side}_elbow", f"{side}_hand"))
    return rs, se, eh


def _finish(value, side, name, limits, clamp):
    if side == "right" and name != "shoulder_pitch":
        value = -value
    if clamp:
        limits = limits or default_limits()
        value = limits.clip_channel(f"{side[0]}_{name}", value)
    return value


def _angle(a, b) -> float:
    return math.acos(min(1.0, max(-1.0, float(np.dot(normalize(a), normalize(b))))))


def shoulder_roll(frame, side="left", limits=None, clamp=True) -> float:
    rs, se, _ = arm_vectors(frame, side)
    return _finish(_angle(rs, se) - HALF_PI, side, "shoulder_roll", limits, clamp)


def elbow_roll(frame, side="left", limits=None, clamp=True) -> float:
    _, se, eh = arm_vectors(frame, side)
    return _finish(_angle(se, eh) - math.pi, side, "elbow_roll", limits, clamp)


def elbow_yaw(frame, side="left", limits=None, clamp=True) -> float:
    _, _, eh = arm_vectors(frame, side)
    u = normalize(eh)
    if math.hypot(u[1], u[2]) <= EPS:
        raise DegenerateGeometryError("forearm is parallel to the lateral axis")
    theta = math.atan2(u[2], u[1])
    return _finish(range_conv(theta), side, "elbow_yaw", limits, clamp)


def shoulder_pitch(frame, side="left", limits=None, clamp=True) -> float:
    _, se, _ = arm_vectors(frame, side)
    u = normalize(se)
    return _finish(math.asin(min(1.0, max(-1.0, u[2]))), side, "shoulder_pitch", limits, clamp)


def head_vector(frame: SkeletonFrame) -> np.ndarray:
    """Neck-to-head vector in the body frame, turned a quarter turn
    about the lateral axis so the upright head points forward."""
    hn = to_body(vector_between(frame, "neck", "head"))
    normalize(hn)  # degeneracy check
    return rotate_x(hn, -HALF_PI)


def human_head_yaw(frame: SkeletonFrame) -> float:
    v = head_vector(frame)
    return math.atan2(v[0], v[1])


def human_head_pitch(frame: SkeletonFrame) -> float:
    v = head_vector(frame)
    return math.atan2(v[2], v[1])


def head_yaw(frame, limits=None, clamp=True) -> float:
    limits = limits or default_limits()
    value = limits.k1 * human_head_yaw(frame)
    return limits.clip_channel("head_yaw", value) if clamp else value


def head_pitch(frame, limits=None, clamp=True, pitch_offset=0.0) -> float:
    """Head pitch with the rest-pose offset removed and a yaw-coupled lift.

    The correction ``|k2 * head_yaw|`` uses the (clamped, if ``clamp``)
    robot head yaw.
    """
    limits = limits or default_limits()
    yaw = head_yaw(frame, limits, clamp=clamp)
    value = human_head_pitch(frame) - pitch_offset + abs(limits.k2 * yaw)
    return limits.clip_channel("head_pitch", value) if clamp else value


ARM_JOINTS = {
    "shoulder_pitch": shoulder_pitch,
    "shoulder_roll": shoulder_roll,
    "elbow_yaw": elbow_yaw,
    "elbow_roll": elbow_roll,
}


def retarget_frame(
    frame: SkeletonFrame,
    left_glove: GloveReading = NEUTRAL_READING,
    right_glove: GloveReading = NEUTRAL_READING,
    limits: JointLimits | None = None,
    prev=None,
    rng: np.random.Generator | None = None,
    pitch_offset: float = 0.0,
    holds: list | None = None,
) -> np.ndarray:
    """Compute one clamped 14-channel robot pose.

    Joints whose geometry is degenerate keep their value from ``prev`` (or
    the rest pose); their channel names are appended to ``holds`` if given.
    Hand opening is drawn uniformly from ``rng``.
    """
    limits = limits or default_limits()
    rng = rng if rng is not None else np.random.default_rng(limits.seed)
    fallback = limits.rest_pose() if prev is None else np.asarray(prev, dtype=np.float64)
    q = np.empty(N_CHANNELS)

    def fill(channel, compute):
        i = CHANNEL_INDEX[channel]
        try:
            q[i] = compute()
        except DegenerateGeometryError:
            q[i] = limits.clip_channel(channel, fallback[i])
            if holds is not None:
                holds.append(channel)

    fill("head_yaw", lambda: head_yaw(frame, limits))
    fill("head_pitch", lambda: head_pitch(frame, limits, pitch_offset=pitch_offset))
    gloves = {"left": left_glove, "right": right_glove}
    for side in SIDES:
        for name, fn in ARM_JOINTS.items():
            fill(f"{side[0]}_{name}", functools.partial(fn, frame, side, limits))
        reading = gloves[side]
        if reading.palm_only:
            override = limits.palm_up_elbow_yaw if side == "left" else -limits.palm_up_elbow_yaw
            q[arm_channel(side, "elbow_yaw")] = limits.clip_channel(f"{side[0]}_elbow_yaw", override)
        yaw = wrist_yaw_from_reading(reading, limits.normalizer, limits.max_wrist_yaw)
        if side == "right":
            yaw = -yaw
        q[arm_channel(side, "wrist_yaw")] = limits.clip_channel(f"{side[0]}_wrist_yaw", yaw)
    hands = rng.uniform(0.0, 1.0, size=2)
    q[arm_channel("left", "hand")] = limits.clip_channel("l_hand", hands[0])
    q[arm_channel("right", "hand")] = limits.clip_channel("r_hand", hands[1])
    return q


def _frames(X) -> list[SkeletonFrame]:
    if isinstance(X, Recording):
        return X.frames
    if isinstance(X, SkeletonFrame):
        return [X]
    frames = list(X)
    if not all(isinstance(f, SkeletonFrame) for f in frames):
        raise ValidationError("expected a Recording or a sequence of SkeletonFrame")
    return frames


class Retargeter(TransformerMixin, BaseEstimator):
    """Skeleton frames in, ``(n_frames, 14)`` robot poses out.

    ``fit`` calibrates the head-pitch zero from the first
    ``limits.calibration_frames`` frames (the subject's rest posture).
    ``transform`` is a sequential fold: it threads the previous pose for
    hold-on-degenerate and restarts the hand-opening RNG from
    ``random_state`` on every call, so repeated calls are reproducible.

    Parameters
    ----------
    limits : JointLimits, optional
        Robot configuration; defaults to the bundled Pepper table.
    random_state : int, optional
        Seed for hand opening; defaults to ``limits.seed``.
    """

    def __init__(self, limits=None, random_state=None):
        self.limits = limits
        self.random_state = random_state

    def _limits(self) -> JointLimits:
        return self.limits if self.limits is not None else default_limits()

    def fit(self, X, y=None):
        frames = _frames(X)
        if not frames:
            raise ValidationError("cannot calibrate on zero frames")
        limits = self._limits()
        pitches = []
        for frame in frames[: limits.calibration_frames]:
            try:
                pitches.append(human_head_pitch(frame))
            except DegenerateGeometryError:
                continue
        self.pitch_offset_ = float(np.mean(pitches)) if pitches else 0.0
        self.n_features_in_ = N_CHANNELS
        return self

    def transform(self, X, gloves=None):
        """Retarget frames; ``gloves`` is an optional per-frame list of
        ``(left, right)`` :class:`GloveReading` pairs."""
        check_is_fitted(self, "pitch_offset_")
        frames = _frames(X)
        if gloves is not None and len(gloves) != len(frames):
            raise ValidationError(f"{len(gloves)} glove readings for {len(frames)} frames")
        limits = self._limits()
        seed = self.random_state if self.random_state is not None else limits.seed
        rng = np.random.default_rng(seed)
        out = np.empty((len(frames), N_CHANNELS))
        holds: list[str] = []
        prev = None
        for i, frame in enumerate(frames):
            left, right = gloves[i] if gloves is not None else (NEUTRAL_READING, NEUTRAL_READING)
            prev = out[i] = retarget_frame(
                frame, left, right, limits, prev, rng, self.pitch_offset_, holds
            )
        self.holds_ = holds
        return out
