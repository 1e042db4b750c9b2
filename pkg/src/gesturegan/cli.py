"""Command-line entry point.

Exit status: 0 success, 2 validation error, 3 I/O error, 4 numerical
abort (non-finite training loss).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from . import pipeline
from .dataset import POSES_PER_UM
from .exceptions import StageError, TrainingDivergedError
from .poses import CHANNELS, load_limits
from .sequence import DEFAULT_BLEND, DEFAULT_FRAME_PERIOD, ascii_timeline, load_sequence
from .synth import write_synthetic

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("gesturegan")


def _add_limits(p):
    p.add_argument("--limits", help="robot config TOML (default: bundled Pepper table)")


def _add_gan(p):
    p.add_argument("--epochs", type=int, default=2000, help="training epochs (default: 2000)")
    p.add_argument("--batch-size", type=int, default=16, help="default: 16")
    p.add_argument("--lr", type=float, default=0.0002, help="Adam learning rate (default: 0.0002)")
    p.add_argument("--beta1", type=float, default=0.5, help="default: 0.5")
    p.add_argument("--beta2", type=float, default=0.999, help="default: 0.999")
    p.add_argument("--z-dim", type=int, default=100, help="noise dimension (default: 100)")
    p.add_argument("--checkpoint-every", type=int, default=0, help="epochs between checkpoints; 0 = only at the end")


def _gan_params(args):
    return dict(
        batch_size=args.batch_size,
        learning_rate=args.lr,
        beta1=args.beta1,
        beta2=args.beta2,
        z_dim=args.z_dim,
        checkpoint_every=args.checkpoint_every,
    )


def _add_sequence(p):
    p.add_argument("--blend", type=int, default=DEFAULT_BLEND, help=f"interpolated poses per seam (default: {DEFAULT_BLEND})")
    p.add_argument(
        "--frame-period", type=float, default=DEFAULT_FRAME_PERIOD, help=f"seconds per pose (default: {DEFAULT_FRAME_PERIOD})"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gesturegan", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic recording with glove crops")
    p.add_argument("--frames", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--fps", type=float, default=4.0, help="default: 4.0")
    p.add_argument("--window", type=int, default=32, help="glove crop side in pixels (default: 32)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("retarget", help="skeleton recording -> robot pose stream")
    p.add_argument("recording")
    p.add_argument("--hands", help="hand sidecar (default: hands.jsonl next to the recording, if present)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, help="hand-opening seed (default: [session] seed in the config)")
    _add_limits(p)

    p = sub.add_parser("dataset", help="corpus tools")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    b = dsub.add_parser("build", help="pose streams -> normalized corpus.bin")
    b.add_argument("poses", nargs="+")
    b.add_argument("--out", required=True)
    b.add_argument("--stride", type=int, default=POSES_PER_UM, help=f"window stride in poses (default: {POSES_PER_UM})")
    b.add_argument("--holdout", type=float, default=0.0, help="fraction of UMs written to <out>.holdout.bin")
    _add_limits(b)

    p = sub.add_parser("train", help="train the GAN on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", required=True, help="model directory")
    p.add_argument("--seed", type=int, default=0)
    _add_gan(p)

    p = sub.add_parser("generate", help="sample a gesture sequence for a speech duration")
    p.add_argument("--model", required=True)
    p.add_argument("--duration", type=float, required=True, help="seconds")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    _add_sequence(p)

    p = sub.add_parser("play", help="show or stream a sequence")
    p.add_argument("--seq", required=True)
    p.add_argument("--stream", action="store_true", help="emit JSON frames on stdout at wall-clock rate")
    p.add_argument("--speed", type=float, default=1.0, help="playback speed factor for --stream")
    p.add_argument("--width", type=int, default=72)
    _add_limits(p)

    p = sub.add_parser("pipeline", help="retarget -> dataset -> train -> generate")
    p.add_argument("--recording", required=True)
    p.add_argument("--hands")
    p.add_argument("--workdir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--stride", type=int, default=POSES_PER_UM)
    p.add_argument("--duration", type=float, default=10.0, help="seconds of gesture to generate (default: 10)")
    _add_limits(p)
    _add_gan(p)
    _add_sequence(p)
    return parser


def _play(args):
    seq = load_sequence(args.seq)
    if not args.stream:
        print(ascii_timeline(seq, load_limits(args.limits), CHANNELS, args.width))
        return
    delay = seq.frame_period / args.speed if args.speed > 0 else 0.0
    for t, q in zip(seq.timestamps.tolist(), seq.poses.tolist()):
        print(json.dumps({"t": t, "q": q}), flush=True)
        if delay:
            time.sleep(delay)


def run(args) -> None:
    cmd = args.command
    if cmd == "synth":
        path = write_synthetic(args.out, args.frames, args.seed, args.fps, args.window)
        print(path)
    elif cmd == "retarget":
        limits = load_limits(args.limits)
        stats = pipeline.retarget_file(args.recording, args.out, limits, args.hands, args.seed)
        print(json.dumps(stats))
    elif cmd == "dataset":
        corpus = pipeline.build_corpus_file(args.poses, args.out, load_limits(args.limits), args.stride, args.holdout)
        print(json.dumps({"units": len(corpus), "out": args.out}))
    elif cmd == "train":
        gan = pipeline.train_file(args.corpus, args.out, epochs=args.epochs, random_state=args.seed, **_gan_params(args))
        print(json.dumps({"epochs": gan.epochs_trained_, "d_loss": gan.log_.d_loss[-1], "g_loss": gan.log_.g_loss[-1]}))
    elif cmd == "generate":
        seq = pipeline.generate_file(args.model, args.out, args.duration, args.seed, args.blend, args.frame_period)
        print(json.dumps({"poses": len(seq), "duration": seq.duration, "out": args.out}))
    elif cmd == "play":
        _play(args)
    elif cmd == "pipeline":
        paths = pipeline.run_pipeline(
            args.recording,
            args.workdir,
            load_limits(args.limits),
            hands_path=args.hands,
            stride=args.stride,
            epochs=args.epochs,
            seed=args.seed,
            duration=args.duration,
            blend=args.blend,
            frame_period=args.frame_period,
            gan_params=_gan_params(args),
        )
        print(json.dumps({k: str(v) for k, v in paths.items()}))


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, StageError):
        return exit_code(exc.cause)
    if isinstance(exc, TrainingDivergedError):
        return EXIT_NUMERIC
    if isinstance(exc, (ValueError, KeyError)):
        return EXIT_VALIDATION
    if isinstance(exc, OSError):
        return EXIT_IO
    return 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except (StageError, TrainingDivergedError, ValueError, KeyError, OSError) as exc:
        print(f"gesturegan: error: {exc}", file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
