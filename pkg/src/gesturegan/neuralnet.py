"""A small fully connected network with explicit backprop and Adam.

Everything is float64. ``forward`` returns the output together with a
tape of per-layer inputs and pre-activations; ``backward`` consumes that
tape. Parameters are exposed as a flat list ``[W0, b0, W1, b1, ...]``
so the optimizer can update them in place.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._binio import read_blob, write_blob
from .exceptions import ValidationError

MODEL_FORMAT = "gesturegan.mlp"
MODEL_VERSION = 1
LEAK = 0.2


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


# name -> (f(z), f'(z) given z and a = f(z))
ACTIVATIONS = {
    "identity": (lambda z: z, lambda z, a: np.ones_like(z)),
    "relu": (lambda z: np.maximum(z, 0.0), lambda z, a: (z > 0).astype(np.float64)),
    "leaky_relu": (
        lambda z: np.where(z > 0, z, LEAK * z),
        lambda z, a: np.where(z > 0, 1.0, LEAK),
    ),
    "tanh": (np.tanh, lambda z, a: 1.0 - a * a),
    "sigmoid": (_sigmoid, lambda z, a: a * (1.0 - a)),
}


@dataclass
class Dense:
    W: np.ndarray  # (out, in)
    b: np.ndarray  # (out,)
    activation: str = "identity"

    def __post_init__(self):
        if self.activation not in ACTIVATIONS:
            raise ValidationError(f"unknown activation {self.activation!r}")
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        if self.W.ndim != 2 or self.b.shape != (self.W.shape[0],):
            raise ValidationError(f"bias shape {self.b.shape} does not match weights {self.W.shape}")

    @property
    def n_in(self):
        return self.W.shape[1]

    @property
    def n_out(self):
        return self.W.shape[0]


@dataclass
class Tape:
    inputs: list
    pre: list
    post: list


class Mlp:
    def __init__(self, layers: list[Dense]):
        if not layers:
            raise ValidationError("network needs at least one layer")
        for a, b in zip(layers, layers[1:]):
            if a.n_out != b.n_in:
                raise ValidationError(f"layer sizes do not chain: {a.n_out} -> {b.n_in}")
        self.layers = layers

    @classmethod
    def glorot(cls, sizes, activations, rng: np.random.Generator) -> "Mlp":
        """Glorot-uniform weights, zero biases.

        ``sizes`` lists the widths including input and output;
        ``activations`` has one entry per layer.
        """
        if len(activations) != len(sizes) - 1:
            raise ValidationError("need one activation per layer")
        layers = []
        for n_in, n_out, act in zip(sizes[:-1], sizes[1:], activations):
            bound = np.sqrt(6.0 / (n_in + n_out))
            layers.append(Dense(rng.uniform(-bound, bound, size=(n_out, n_in)), np.zeros(n_out), act))
        return cls(layers)

    @property
    def sizes(self):
        return [self.layers[0].n_in] + [layer.n_out for layer in self.layers]

    @property
    def activations(self):
        return [layer.activation for layer in self.layers]

    def params(self) -> list[np.ndarray]:
        out = []
        for layer in self.layers:
            out.extend((layer.W, layer.b))
        return out

    def copy(self) -> "Mlp":
        return Mlp([Dense(l.W.copy(), l.b.copy(), l.activation) for l in self.layers])

    def forward(self, X) -> tuple[np.ndarray, Tape]:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.layers[0].n_in:
            raise ValidationError(f"expected batch of width {self.layers[0].n_in}, got shape {X.shape}")
        tape = Tape([], [], [])
        a = X
        for layer in self.layers:
            z = a @ layer.W.T + layer.b
            tape.inputs.append(a)
            tape.pre.append(z)
            a = ACTIVATIONS[layer.activation][0](z)
            tape.post.append(a)
        return a, tape

    def __call__(self, X) -> np.ndarray:
        return self.forward(X)[0]

    def backward(self, tape: Tape, grad, through_output_activation: bool = True):
        """Reverse-mode gradients for a forward pass recorded in ``tape``.

        ``grad`` is dLoss/dOutput (or dLoss/dPre-activation of the last
        layer when ``through_output_activation`` is False, which lets a
        caller fold a sigmoid into a numerically stable loss).

        Returns ``(param_grads, input_grad)`` with ``param_grads`` aligned
        to :meth:`params`.
        """
        grad = np.asarray(grad, dtype=np.float64)
        if len(tape.pre) != len(self.layers):
            raise ValidationError("tape does not belong to this network")
        if grad.shape != tape.post[-1].shape:
            raise ValidationError(f"gradient shape {grad.shape} != output shape {tape.post[-1].shape}")
        grads: list[np.ndarray] = [None] * (2 * len(self.layers))
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            if i == len(self.layers) - 1 and not through_output_activation:
                dz = grad
            else:
                dz = grad * ACTIVATIONS[layer.activation][1](tape.pre[i], tape.post[i])
            grads[2 * i] = dz.T @ tape.inputs[i]
            grads[2 * i + 1] = dz.sum(axis=0)
            grad = dz @ layer.W
        return grads, grad


class Adam:
    """Adam with bias correction; updates parameter arrays in place."""

    def __init__(self, params, lr=0.0002, beta1=0.5, beta2=0.999, eps=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads) -> None:
        if len(params) != len(self.m) or len(grads) != len(params):
            raise ValidationError("parameter/gradient lists do not match optimizer state")
        self.t += 1
        bc1 = 1.0 - self.beta1**self.t
        bc2 = 1.0 - self.beta2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            if g.shape != p.shape:
                raise ValidationError(f"gradient shape {g.shape} != parameter shape {p.shape}")
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            p -= self.lr * (m / bc1) / (np.sqrt(v / bc2) + self.eps)


def save_model(net: Mlp, path, **meta) -> None:
    header = {
        "format": MODEL_FORMAT,
        "version": MODEL_VERSION,
        "sizes": net.sizes,
        "activations": net.activations,
        **meta,
    }
    payload = np.concatenate([p.ravel() for p in net.params()])
    write_blob(path, header, payload)


def load_model(path) -> tuple[Mlp, dict]:
    header, payload = read_blob(path)
    if header.get("format") != MODEL_FORMAT or header.get("version") != MODEL_VERSION:
        raise ValidationError(f"{path}: not a version-{MODEL_VERSION} model file")
    sizes, acts = header["sizes"], header["activations"]
    layers, pos = [], 0
    for n_in, n_out, act in zip(sizes[:-1], sizes[1:], acts):
        W = payload[pos : pos + n_in * n_out].reshape(n_out, n_in).copy()
        pos += n_in * n_out
        b = payload[pos : pos + n_out].copy()
        pos += n_out
        layers.append(Dense(W, b, act))
    if pos != payload.size:
        raise ValidationError(f"{path}: payload size does not match architecture")
    return Mlp(layers), header
