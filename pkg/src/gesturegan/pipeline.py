"""File-to-file pipeline stages, shared by the CLI subcommands."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from .dataset import POSES_PER_UM, Corpus, NormalizationSpec, build_corpus, load_corpus, save_corpus
from .exceptions import StageError, ValidationError
from .gan import GestureGAN, generate_ums
from .glove import load_hand_sidecar
from .poses import JointLimits, read_pose_stream, write_pose_stream
from .retarget import Retargeter
from .sequence import DEFAULT_BLEND, DEFAULT_FRAME_PERIOD, assemble, export_sequence, ums_needed
from .skeleton import load_recording

log = logging.getLogger(__name__)


def find_sidecar(recording_path) -> Path | None:
    p = Path(recording_path).with_name("hands.jsonl")
    return p if p.exists() else None


def retarget_file(recording_path, out_path, limits: JointLimits, hands_path=None, seed=None) -> dict:
    rec = load_recording(recording_path)
    hands_path = hands_path or find_sidecar(recording_path)
    gloves = load_hand_sidecar(hands_path, len(rec), limits.window) if hands_path else None
    model = Retargeter(limits=limits, random_state=seed).fit(rec)
    poses = model.transform(rec, gloves=gloves)
    write_pose_stream(out_path, rec.timestamps, poses)
    return {"frames": len(rec), "holds": len(model.holds_), "pitch_offset": model.pitch_offset_}


def build_corpus_file(pose_paths, out_path, limits: JointLimits, stride=POSES_PER_UM, holdout=0.0) -> Corpus:
    streams = {}
    for p in pose_paths:
        rid = Path(p).stem
        if rid in streams:
            raise ValidationError(f"duplicate recording id {rid!r}")
        streams[rid] = read_pose_stream(p)[1]
    corpus = build_corpus(streams, NormalizationSpec.from_limits(limits), stride)
    if len(corpus) == 0:
        n = {rid: len(q) for rid, q in streams.items()}
        raise ValidationError(
            f"no units of movement: each needs {POSES_PER_UM} consecutive poses, got {n}"
        )
    if not 0.0 <= holdout < 1.0:
        raise ValidationError("holdout must lie in [0, 1)")
    n_hold = int(round(holdout * len(corpus)))
    if n_hold:
        held = Corpus(corpus.ums[-n_hold:], corpus.norm, corpus.provenance)
        corpus = Corpus(corpus.ums[:-n_hold], corpus.norm, corpus.provenance)
        out = Path(out_path)
        save_corpus(held, out.with_name(out.stem + ".holdout" + out.suffix))
    save_corpus(corpus, out_path)
    return corpus


def train_file(corpus_path, model_dir, **params) -> GestureGAN:
    corpus = load_corpus(corpus_path)
    gan = GestureGAN(checkpoint_dir=str(model_dir), **params)
    return gan.fit(corpus)


def generate_file(model_dir, out_path, duration, seed=0, blend=DEFAULT_BLEND, frame_period=DEFAULT_FRAME_PERIOD):
    gan = GestureGAN.load(model_dir)
    if gan.norm_ is None:
        raise ValidationError(f"{model_dir}: model has no normalization bounds")
    n = ums_needed(duration, frame_period)
    if n == 0:
        raise ValidationError("duration too short for a single unit of movement")
    ums = generate_ums(gan.generator_, n, np.random.default_rng(seed), gan.norm_)
    seq = assemble(ums, frame_period, blend)
    export_sequence(seq, out_path)
    return seq


def run_pipeline(
    recording_path,
    workdir,
    limits: JointLimits,
    hands_path=None,
    stride=POSES_PER_UM,
    epochs=2000,
    seed=0,
    duration=10.0,
    blend=DEFAULT_BLEND,
    frame_period=DEFAULT_FRAME_PERIOD,
    gan_params=None,
) -> dict:
    """retarget -> dataset -> train -> generate; failures raise
    :class:`StageError` naming the stage."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    paths = {
        "poses": workdir / "poses.jsonl",
        "corpus": workdir / "corpus.bin",
        "model": workdir / "model",
        "sequence": workdir / "seq.jsonl",
    }
    stages = [
        ("retarget", lambda: retarget_file(recording_path, paths["poses"], limits, hands_path, seed)),
        ("dataset", lambda: build_corpus_file([paths["poses"]], paths["corpus"], limits, stride)),
        ("train", lambda: train_file(paths["corpus"], paths["model"], epochs=epochs, random_state=seed, **(gan_params or {}))),
        ("generate", lambda: generate_file(paths["model"], paths["sequence"], duration, seed, blend, frame_period)),
    ]
    for name, run in stages:
        log.info("stage %s", name)
        try:
            run()
        except Exception as exc:
            raise StageError(name, exc) from exc
    return paths
