"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import math
import time
from fractions import Fraction

import numpy as np

import oracles
from acceptance_log import record
from frames import random_frame
from gradcheck import kink_free_batch, max_relative_error
from gesturegan.dataset import NormalizationSpec, unpack_ums, window_poses
from gesturegan.gan import GestureGAN, generate_ums
from gesturegan.glove import GloveReading, wrist_yaw_from_reading
from gesturegan.neuralnet import Mlp
from gesturegan.pipeline import retarget_file, run_pipeline
from gesturegan.poses import read_pose_stream
from gesturegan.retarget import (
    elbow_roll,
    elbow_yaw,
    head_pitch,
    head_yaw,
    range_conv,
    retarget_frame,
    shoulder_pitch,
    shoulder_roll,
)
from gesturegan.sequence import assemble, ums_needed
from gesturegan.synth import write_synthetic

PI = math.pi


def test_kinematics_match_geometric_oracle(rng, limits):
    arm = {
        "shoulder_roll": (shoulder_roll, oracles.shoulder_roll),
        "elbow_roll": (elbow_roll, oracles.elbow_roll),
        "elbow_yaw": (elbow_yaw, oracles.elbow_yaw),
        "shoulder_pitch": (shoulder_pitch, oracles.shoulder_pitch),
    }
    worst = dict.fromkeys([*arm, "head_yaw", "head_pitch"], 0.0)
    start = time.perf_counter()
    for _ in range(10_000):
        f = random_frame(rng)
        for side in ("left", "right"):
            for name, (impl, oracle) in arm.items():
                worst[name] = max(worst[name], abs(impl(f, side, clamp=False) - oracle(f.joints, side)))
        worst["head_yaw"] = max(worst["head_yaw"], abs(head_yaw(f, limits, clamp=False) - oracles.head_yaw(f.joints, limits.k1)))
        expected = oracles.head_pitch(f.joints, limits.k1, limits.k2)
        worst["head_pitch"] = max(worst["head_pitch"], abs(head_pitch(f, limits, clamp=False) - expected))
    elapsed = time.perf_counter() - start
    err = max(worst.values())
    ok = err < 1e-9 and elapsed < 10.0
    record("1 kinematics oracle", ok, f"max |d| = {err:.2e} rad over 10000 frames x 6 joints, {elapsed:.1f} s")
    assert ok, worst


def test_range_conv_endpoints():
    cases = [(PI / 2, -PI / 2), (PI, 0.0), (-PI, 0.0), (-PI / 2, PI)]
    got = [range_conv(x) for x, _ in cases]
    ok = all(g == want for g, (_, want) in zip(got, cases))
    record("2 elbow-yaw range endpoints", ok, f"{got}")
    assert ok


def ieee(value):
    """Correctly rounded double of an exact rational."""
    return float(value)


def wrist_yaw_oracle(m, n, w, palm):
    # each IEEE operation modeled as an exact rational rounded to double
    m = min(m, n)
    if palm:
        return ieee(Fraction(ieee(Fraction(m) / Fraction(n))) * Fraction(w))
    num = ieee(Fraction(m) - Fraction(n))
    return ieee(Fraction(ieee(Fraction(num) / Fraction(n))) * Fraction(w))


def test_wrist_yaw_two_branch_formula():
    mismatches, checked = [], 0
    for n in (1, 7, 100, 512, 513, 1024):
        for w in (0.5, 1.0, 1.8239, PI / 2, 2.0857):
            for m in sorted({0, 1, 2, n // 3, n // 2, n - 1, n, n + 5}):
                for palm in (True, False):
                    reading = GloveReading(m, 0) if palm else GloveReading(0, m)
                    if m == 0 and not palm:
                        continue  # a 0/0 reading is a palm tie
                    got = wrist_yaw_from_reading(reading, n, w)
                    checked += 1
                    if got != wrist_yaw_oracle(m, n, w, palm):
                        mismatches.append((m, n, w, palm, got))
    saturate = all(wrist_yaw_from_reading(GloveReading(n, 0), n, w) == w for n in (1, 7, 512) for w in (0.5, 1.8239, PI / 2))
    ok = not mismatches and saturate
    record("3 wrist-yaw formula", ok, f"{checked} grid points, {len(mismatches)} mismatches, palm max=N -> W exact: {saturate}")
    assert ok, mismatches[:5]


def test_joint_limit_safety(rng, limits):
    prev, bad_retarget = None, 0
    for i in range(10_000):
        left = GloveReading(*(int(v) for v in rng.integers(0, 700, 2)))
        right = GloveReading(*(int(v) for v in rng.integers(0, 700, 2)))
        prev = retarget_frame(random_frame(rng, i), left, right, limits, prev, rng, pitch_offset=float(rng.normal()))
        bad_retarget += not limits.contains(prev)
    norm = NormalizationSpec.from_limits(limits)
    G, _ = GestureGAN().init_networks(np.random.default_rng(0))
    plain = unpack_ums(generate_ums(G, 5_000, rng, norm))
    for p in G.params():
        p *= 50.0  # saturated tanh: outputs pinned at +-1
    saturated = unpack_ums(generate_ums(G, 5_000, rng, norm))
    bad_generated = int((~((plain >= limits.lo) & (plain <= limits.hi))).any(axis=1).sum())
    bad_generated += int((~((saturated >= limits.lo) & (saturated <= limits.hi))).any(axis=1).sum())
    ok = bad_retarget == 0 and bad_generated == 0
    record(
        "4 joint-limit safety",
        ok,
        f"{bad_retarget}/10000 retargeted poses and {bad_generated}/10000 generated UMs out of limits",
    )
    assert ok


def test_gradient_check_three_architectures():
    rng = np.random.default_rng(7)
    G, D = GestureGAN().init_networks(rng)
    small = Mlp.glorot([5, 9, 7, 3], ["tanh", "leaky_relu", "sigmoid"], rng)
    start = time.perf_counter()
    errors = {}
    for name, net in (("G 100-128-256-56", G), ("D 56-256-128-1", D), ("5-9-7-3", small)):
        X = kink_free_batch(net, rng, 4)
        R = rng.normal(size=(4, net.layers[-1].n_out))
        errors[name] = max_relative_error(net, X, R)
    elapsed = time.perf_counter() - start
    ok = max(errors.values()) < 1e-4 and elapsed < 60.0
    detail = ", ".join(f"{k}: {v:.1e}" for k, v in errors.items())
    record("5 finite-difference gradients", ok, f"{detail}; {elapsed:.1f} s")
    assert ok


def test_single_mode_convergence():
    rng = np.random.default_rng(11)
    u_star = rng.uniform(-0.8, 0.8, size=56)
    corpus = np.tile(u_star, (256, 1))
    start = time.perf_counter()
    gan = GestureGAN(batch_size=16, learning_rate=0.0002, beta1=0.5, beta2=0.999, epochs=500, random_state=0)
    gan.fit(corpus)
    samples = gan.sample(256, random_state=1)
    err = float(np.abs(samples - u_star).max(axis=1).mean())
    elapsed = time.perf_counter() - start
    ok = err < 0.15 and elapsed < 300.0
    record("6 single-mode GAN", ok, f"mean sup-norm error {err:.3f} after 500 epochs, {elapsed:.0f} s")
    assert ok


def test_pipeline_is_byte_deterministic(tmp_path, limits):
    rec = write_synthetic(tmp_path / "rec", n_frames=240, seed=3, fps=4.0, window=limits.window)
    runs = []
    for name in ("a", "b"):
        paths = run_pipeline(rec, tmp_path / name, limits, epochs=20, seed=5, duration=8.0)
        files = [paths["poses"], paths["corpus"], paths["sequence"], *sorted(paths["model"].iterdir())]
        runs.append({p.relative_to(tmp_path / name).as_posix(): p.read_bytes() for p in files})
    same = runs[0] == runs[1]
    record("7 pipeline determinism", same, f"{len(runs[0])} files compared: {', '.join(sorted(runs[0]))}")
    assert same


def test_corpus_magnitude(tmp_path, limits):
    rec = write_synthetic(tmp_path / "rec", n_frames=9 * 60 * 4, seed=0, fps=4.0, window=limits.window)
    retarget_file(rec, tmp_path / "poses.jsonl", limits)
    poses = read_pose_stream(tmp_path / "poses.jsonl")[1]
    n4, n1 = len(window_poses(poses, 4)), len(window_poses(poses, 1))
    ok = n4 == 540 and n1 == 2157 and n4 <= 2018 <= n1 and abs(n1 - 2018) <= 0.2 * 2018
    record("8 corpus magnitude", ok, f"9 min at 4 poses/s -> {n4} UMs (stride 4), {n1} UMs (stride 1); reference 2018")
    assert ok


def test_sequence_length_law(rng):
    bad = 0
    for _ in range(200):
        n, k = int(rng.integers(1, 51)), int(rng.integers(0, 6))
        bad += len(assemble(rng.uniform(-1, 1, size=(n, 56)), 0.25, k)) != 4 * n + k * (n - 1)
    grid_bad = 0
    for millis in range(0, 60_001, 125):
        exact = math.ceil(Fraction(millis, 1000) / (4 * Fraction(1, 4)))
        grid_bad += ums_needed(millis / 1000, 0.25) != exact
    for centis in range(0, 2001):
        exact = math.ceil(Fraction(centis, 100) / (4 * Fraction(1, 4)))
        grid_bad += ums_needed(centis / 100, 0.25) != exact
    ok = bad == 0 and grid_bad == 0
    record("9 sequence length law", ok, f"{bad}/200 assemblies and {grid_bad} ums_needed grid points disagree")
    assert ok
