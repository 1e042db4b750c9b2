"""Talking-gesture synthesis for humanoid robots.

Recorded skeletons are retargeted to robot joint angles, windowed into
four-pose units of movement, and used to train a small GAN whose samples
are stitched into gesture sequences of any length.
"""

from .dataset import Corpus, NormalizationSpec, UnitScaler, build_corpus, window_poses
from .gan import GestureGAN, generate_ums, sample_noise
from .poses import CHANNELS, JointLimits, load_limits
from .retarget import Retargeter, retarget_frame
from .sequence import GestureSequence, assemble, ums_needed
from .skeleton import JOINTS, Recording, SkeletonFrame, load_recording, save_recording

__version__ = "0.1.0"

__all__ = [
    "CHANNELS",
    "JOINTS",
    "Corpus",
    "GestureGAN",
    "GestureSequence",
    "JointLimits",
    "NormalizationSpec",
    "Recording",
    "Retargeter",
    "SkeletonFrame",
    "UnitScaler",
    "assemble",
    "build_corpus",
    "generate_ums",
    "load_limits",
    "load_recording",
    "retarget_frame",
    "sample_noise",
    "save_recording",
    "ums_needed",
    "window_poses",
]
