"""Procedural talking-gesture skeletons with matching glove crops.

Arms swing on slow incommensurate sinusoids inside a comfortable human
range: upper arms stay between hanging and horizontal, forearms point
forward so no limb ever lines up with a degenerate direction.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .glove import write_ppm
from .skeleton import JOINT_INDEX, JOINTS, Recording, SkeletonFrame, save_recording

GREEN = (30, 200, 40)
RED = (200, 30, 40)
UPPER_ARM = 0.28
FOREARM = 0.26


def _capture(body):
    """Body frame (x left, y front, z up) to capture frame (x, y up, z away)."""
    body = np.asarray(body)
    return np.stack([body[..., 0], body[..., 2], -body[..., 1]], axis=-1)


def _direction(elev, azim, lateral):
    c = np.cos(elev)
    return np.stack([lateral * c * np.cos(azim), c * np.sin(azim), np.sin(elev)], axis=-1)


def synth_positions(n_frames: int, seed: int, fps: float = 4.0) -> np.ndarray:
    """``(n_frames, 15, 3)`` capture-space joint positions."""
    rng = np.random.default_rng(seed)
    t = np.arange(n_frames) / fps
    phase = rng.uniform(0, 2 * np.pi, size=12)
    speed = rng.uniform(0.4, 1.3, size=12)

    def wave(k, lo, hi):
        return lo + (hi - lo) * 0.5 * (1 + np.sin(speed[k] * t + phase[k]))

    body = np.zeros((n_frames, len(JOINTS), 3))
    fixed = {
        "torso": (0.0, 0.0, 0.0),
        "neck": (0.0, 0.0, 0.30),
        "left_shoulder": (0.18, 0.0, 0.25),
        "right_shoulder": (-0.18, 0.0, 0.25),
        "left_hip": (0.10, 0.0, -0.30),
        "right_hip": (-0.10, 0.0, -0.30),
        "left_knee": (0.10, 0.0, -0.75),
        "right_knee": (-0.10, 0.0, -0.75),
        "left_foot": (0.10, 0.05, -1.20),
        "right_foot": (-0.10, 0.05, -1.20),
    }
    for name, pos in fixed.items():
        body[:, JOINT_INDEX[name]] = pos

    lean, nod = wave(0, -0.15, 0.15), wave(1, -0.12, 0.12)
    body[:, JOINT_INDEX["head"]] = body[:, JOINT_INDEX["neck"]] + 0.2 * np.stack(
        [np.sin(lean), np.cos(lean) * np.sin(nod), np.cos(lean) * np.cos(nod)], axis=-1
    )
    for k, (side, lateral) in enumerate((("left", 1.0), ("right", -1.0))):
        o = 2 + 5 * k
        upper = _direction(wave(o, -1.4, -0.2), wave(o + 1, 0.2, 1.2), lateral)
        fore = _direction(wave(o + 2, -0.6, 0.8), wave(o + 3, 0.6, 1.5), lateral)
        shoulder = body[:, JOINT_INDEX[f"{side}_shoulder"]]
        elbow = shoulder + UPPER_ARM * upper
        body[:, JOINT_INDEX[f"{side}_elbow"]] = elbow
        body[:, JOINT_INDEX[f"{side}_hand"]] = elbow + FOREARM * fore

    body += rng.normal(0.0, 0.002, size=body.shape)
    pos = _capture(body)
    pos[..., 2] += 2.0  # subject stands 2 m from the sensor
    return pos


def synth_recording(n_frames: int, seed: int = 0, fps: float = 4.0, subject: str = "synthetic") -> Recording:
    pos = synth_positions(n_frames, seed, fps)
    frames = [SkeletonFrame.from_array(i / fps, pos[i]) for i in range(n_frames)]
    return Recording(frames, fps=fps, subject=subject, meta={"seed": seed})


def glove_rows(n_frames: int, seed: int, fps: float, window: int) -> np.ndarray:
    """Per frame and hand, how many crop rows show the green palm."""
    rng = np.random.default_rng(seed + 1)
    t = np.arange(n_frames) / fps
    phase = rng.uniform(0, 2 * np.pi, size=2)
    speed = rng.uniform(0.3, 0.9, size=2)
    frac = 0.5 * (1 + np.sin(speed[None, :] * t[:, None] + phase[None, :]))
    return np.rint(frac * window).astype(int)


def glove_crop(green_rows: int, window: int) -> np.ndarray:
    img = np.empty((window, window, 3), dtype=np.uint8)
    img[:green_rows] = GREEN
    img[green_rows:] = RED
    return img


def write_synthetic(out_dir, n_frames: int, seed: int = 0, fps: float = 4.0, window: int = 32) -> Path:
    """Write ``recording.jsonl``, ``hands.jsonl`` and ``crops/`` into
    ``out_dir``; returns the recording path."""
    out_dir = Path(out_dir)
    (out_dir / "crops").mkdir(parents=True, exist_ok=True)
    rec = synth_recording(n_frames, seed, fps)
    rec_path = out_dir / "recording.jsonl"
    save_recording(rec, rec_path)
    rows = glove_rows(n_frames, seed, fps, window)
    for g in np.unique(rows):
        write_ppm(glove_crop(int(g), window), out_dir / "crops" / f"glove_{g:03d}.ppm")
    with (out_dir / "hands.jsonl").open("w", encoding="utf-8") as fh:
        for i, (gl, gr) in enumerate(rows.tolist()):
            entry = {"frame": i, "left": f"crops/glove_{gl:03d}.ppm", "right": f"crops/glove_{gr:03d}.ppm"}
            fh.write(json.dumps(entry) + "\n")
    return rec_path
