"""Vanilla GAN over units of movement.

The discriminator is trained with binary cross-entropy on a real batch
(label 1) and a generated batch (label 0); the generator minimises the
non-saturating loss ``-log D(G(z))``. One discriminator step per
generator step. Losses are computed from the discriminator's logit so
that a saturated sigmoid never produces ``log(0)``.
"""

from __future__ import annotations

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .dataset import UM_SIZE, Corpus, NormalizationSpec, denormalize_um
from .exceptions import ConfigurationError, TrainingDivergedError, ValidationError
from .neuralnet import Adam, Mlp, load_model, save_model

log = logging.getLogger(__name__)

GENERATOR_FILE = "generator.bin"
DISCRIMINATOR_FILE = "discriminator.bin"
TRAINLOG_FILE = "trainlog.csv"


def sample_noise(n: int, z_dim: int, rng: np.random.Generator) -> np.ndarray:
    """i.i.d. uniform noise on [-1, 1]."""
    if n < 0 or z_dim <= 0:
        raise ConfigurationError(f"bad noise shape ({n}, {z_dim})")
    return rng.uniform(-1.0, 1.0, size=(n, z_dim))


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softplus(z):
    return np.logaddexp(0.0, z)


@dataclass
class TrainLog:
    epoch: list = field(default_factory=list)
    d_loss: list = field(default_factory=list)
    g_loss: list = field(default_factory=list)
    d_acc_real: list = field(default_factory=list)
    d_acc_fake: list = field(default_factory=list)

    COLUMNS = ("epoch", "d_loss", "g_loss", "d_acc_real", "d_acc_fake")

    def append(self, **row):
        for key in self.COLUMNS:
            getattr(self, key).append(row[key])

    def __len__(self):
        return len(self.epoch)

    def to_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.COLUMNS)
            for row in zip(*(getattr(self, k) for k in self.COLUMNS)):
                writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])

    @classmethod
    def from_csv(cls, path) -> "TrainLog":
        out = cls()
        with Path(path).open(newline="") as fh:
            for row in csv.DictReader(fh):
                out.append(epoch=int(row["epoch"]), **{k: float(row[k]) for k in cls.COLUMNS[1:]})
        return out


def _atomic(path: Path, writer):
    tmp = path.with_name(path.name + ".tmp")
    writer(tmp)
    os.replace(tmp, path)


class GestureGAN(BaseEstimator):
    """Adversarially trained generator of units of movement.

    Defaults: noise dimension 100, batch 16, Adam with lr 2e-4,
    beta1 0.5, beta2 0.999, 2000 epochs.
    ``fit`` is fully determined by the data and ``random_state``.

    Parameters
    ----------
    checkpoint_dir : path, optional
        When set, generator/discriminator/trainlog are written there every
        ``checkpoint_every`` epochs and once more at the end of training.
    """

    def __init__(
        self,
        z_dim=100,
        batch_size=16,
        learning_rate=0.0002,
        beta1=0.5,
        beta2=0.999,
        epochs=2000,
        generator_hidden=(128, 256),
        discriminator_hidden=(256, 128),
        random_state=0,
        checkpoint_dir=None,
        checkpoint_every=0,
    ):
        self.z_dim = z_dim
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epochs = epochs
        self.generator_hidden = generator_hidden
        self.discriminator_hidden = discriminator_hidden
        self.random_state = random_state
        self.checkpoint_dir = checkpoint_dir
        self.checkpoint_every = checkpoint_every

    def _check_params(self, n_samples):
        for name in ("z_dim", "batch_size", "epochs"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        if self.learning_rate < 0:
            raise ConfigurationError("learning_rate must be >= 0")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ConfigurationError("Adam betas must lie in [0, 1)")
        if n_samples == 0:
            raise ValidationError("cannot train on an empty corpus")
        if self.batch_size > n_samples:
            raise ConfigurationError(f"batch_size {self.batch_size} exceeds corpus size {n_samples}")

    def init_networks(self, rng: np.random.Generator):
        G = Mlp.glorot(
            [self.z_dim, *self.generator_hidden, UM_SIZE],
            ["leaky_relu"] * len(self.generator_hidden) + ["tanh"],
            rng,
        )
        D = Mlp.glorot(
            [UM_SIZE, *self.discriminator_hidden, 1],
            ["leaky_relu"] * len(self.discriminator_hidden) + ["sigmoid"],
            rng,
        )
        return G, D

    def fit(self, X, y=None, norm: NormalizationSpec | None = None):
        """Train on normalized UMs (``(n, 56)`` array or a :class:`Corpus`)."""
        if isinstance(X, Corpus):
            norm = norm or X.norm
            X = X.ums
        X = check_array(X, dtype=np.float64, ensure_min_samples=0)
        if X.shape[1] != UM_SIZE:
            raise ValidationError(f"expected {UM_SIZE} features, got {X.shape[1]}")
        self._check_params(len(X))
        self.norm_ = norm
        rng = np.random.default_rng(self.random_state)
        G, D = self.init_networks(rng)
        opt_g = Adam(G.params(), self.learning_rate, self.beta1, self.beta2)
        opt_d = Adam(D.params(), self.learning_rate, self.beta1, self.beta2)
        self.generator_, self.discriminator_ = G, D
        self.log_ = TrainLog()
        self.n_features_in_ = UM_SIZE

        B = self.batch_size
        n_batches = len(X) // B
        for epoch in range(1, self.epochs + 1):
            order = rng.permutation(len(X))
            sums = np.zeros(4)
            for k in range(n_batches):
                real = X[order[k * B : (k + 1) * B]]
                sums += self._train_step(G, D, opt_g, opt_d, real, rng)
            d_loss, g_loss, acc_r, acc_f = sums / n_batches
            if not (math.isfinite(d_loss) and math.isfinite(g_loss)):
                raise TrainingDivergedError(
                    f"non-finite loss at epoch {epoch} (d_loss={d_loss}, g_loss={g_loss})"
                )
            self.log_.append(epoch=epoch, d_loss=d_loss, g_loss=g_loss, d_acc_real=acc_r, d_acc_fake=acc_f)
            log.debug("epoch %d d_loss=%.4f g_loss=%.4f", epoch, d_loss, g_loss)
            self.epochs_trained_ = epoch
            if self.checkpoint_dir and self.checkpoint_every and epoch % self.checkpoint_every == 0:
                self.save(self.checkpoint_dir)
        if self.checkpoint_dir:
            self.save(self.checkpoint_dir)
        return self

    def _train_step(self, G, D, opt_g, opt_d, real, rng):
        B = len(real)
        # discriminator: real -> 1, fake -> 0
        fake = G(sample_noise(B, self.z_dim, rng))
        _, tape_r = D.forward(real)
        _, tape_f = D.forward(fake)
        l_real, l_fake = tape_r.pre[-1], tape_f.pre[-1]
        d_loss = _softplus(-l_real).mean() + _softplus(l_fake).mean()
        grads_r, _ = D.backward(tape_r, (_sigmoid(l_real) - 1.0) / B, through_output_activation=False)
        grads_f, _ = D.backward(tape_f, _sigmoid(l_fake) / B, through_output_activation=False)
        opt_d.step(D.params(), [a + b for a, b in zip(grads_r, grads_f)])
        acc_r = float(np.mean(l_real > 0))
        acc_f = float(np.mean(l_fake < 0))

        # generator: non-saturating loss -log D(G(z))
        fake, tape_g = G.forward(sample_noise(B, self.z_dim, rng))
        _, tape = D.forward(fake)
        l = tape.pre[-1]
        g_loss = _softplus(-l).mean()
        _, d_input = D.backward(tape, (_sigmoid(l) - 1.0) / B, through_output_activation=False)
        grads_g, _ = G.backward(tape_g, d_input)
        opt_g.step(G.params(), grads_g)
        return np.array([d_loss, g_loss, acc_r, acc_f])

    def sample(self, n: int, random_state=None) -> np.ndarray:
        """``n`` generated UMs in normalized units."""
        check_is_fitted(self, "generator_")
        rng = random_state if isinstance(random_state, np.random.Generator) else np.random.default_rng(random_state)
        if n == 0:
            return np.empty((0, UM_SIZE))
        return self.generator_(sample_noise(n, self.z_dim, rng))

    def discriminate(self, X) -> np.ndarray:
        check_is_fitted(self, "discriminator_")
        return self.discriminator_(X)[:, 0]

    def save(self, directory) -> None:
        check_is_fitted(self, "generator_")
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        meta = {
            "params": {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.get_params().items() if k != "checkpoint_dir"},
            "epoch": getattr(self, "epochs_trained_", 0),
            "seed": self.random_state,
            "norm": self.norm_.to_dict() if self.norm_ is not None else None,
        }
        _atomic(directory / GENERATOR_FILE, lambda p: save_model(self.generator_, p, role="generator", **meta))
        _atomic(directory / DISCRIMINATOR_FILE, lambda p: save_model(self.discriminator_, p, role="discriminator", **meta))
        _atomic(directory / TRAINLOG_FILE, self.log_.to_csv)

    @classmethod
    def load(cls, directory) -> "GestureGAN":
        directory = Path(directory)
        G, header = load_model(directory / GENERATOR_FILE)
        params = dict(header.get("params", {}))
        for key in ("generator_hidden", "discriminator_hidden"):
            if key in params:
                params[key] = tuple(params[key])
        est = cls(**params)
        est.generator_ = G
        disc = directory / DISCRIMINATOR_FILE
        est.discriminator_ = load_model(disc)[0] if disc.exists() else None
        est.norm_ = NormalizationSpec.from_dict(header["norm"]) if header.get("norm") else None
        est.epochs_trained_ = header.get("epoch", 0)
        logf = directory / TRAINLOG_FILE
        est.log_ = TrainLog.from_csv(logf) if logf.exists() else TrainLog()
        est.n_features_in_ = UM_SIZE
        return est


def generate_ums(generator: Mlp, n: int, rng: np.random.Generator, norm: NormalizationSpec, z_dim=None) -> np.ndarray:
    """Draw ``n`` UMs from ``generator`` and decode them to joint units."""
    if n < 0:
        raise ConfigurationError("n must be >= 0")
    z_dim = z_dim or generator.layers[0].n_in
    if n == 0:
        return np.empty((0, UM_SIZE))
    return denormalize_um(generator(sample_noise(n, z_dim, rng)), norm)
