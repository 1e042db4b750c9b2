import numpy as np
import pytest

from gradcheck import input_gradient_error, max_relative_error
from gesturegan.exceptions import ValidationError
from gesturegan.neuralnet import ACTIVATIONS, Adam, Dense, Mlp, load_model, save_model


def matmul_oracle(net, X):
    """Row-by-row forward pass with explicit loops over units."""
    out = []
    for row in X.tolist():
        a = row
        for layer in net.layers:
            W, b = layer.W.tolist(), layer.b.tolist()
            z = [sum(w * x for w, x in zip(W[i], a)) + b[i] for i in range(len(b))]
            if layer.activation == "leaky_relu":
                a = [v if v > 0 else 0.2 * v for v in z]
            elif layer.activation == "tanh":
                a = [float(np.tanh(v)) for v in z]
            elif layer.activation == "sigmoid":
                a = [1.0 / (1.0 + float(np.exp(-v))) for v in z]
            elif layer.activation == "relu":
                a = [max(v, 0.0) for v in z]
            else:
                a = z
        out.append(a)
    return np.array(out)


def test_identity_layer_passes_input_through(rng):
    net = Mlp([Dense(np.eye(5), np.zeros(5))])
    X = rng.normal(size=(3, 5))
    np.testing.assert_array_equal(net(X), X)


@pytest.mark.parametrize("act", sorted(ACTIVATIONS))
def test_zero_weights_give_activation_of_bias(act):
    b = np.array([-1.0, 0.5, 2.0])
    net = Mlp([Dense(np.zeros((3, 4)), b, act)])
    out = net(np.ones((6, 4)))
    np.testing.assert_allclose(out, np.tile(ACTIVATIONS[act][0](b), (6, 1)), atol=1e-15)


def test_forward_matches_loop_oracle(rng):
    net = Mlp.glorot([7, 9, 4], ["leaky_relu", "sigmoid"], rng)
    X = rng.normal(size=(5, 7))
    np.testing.assert_allclose(net(X), matmul_oracle(net, X), atol=1e-12, rtol=0)


def test_dimension_errors(rng):
    net = Mlp.glorot([3, 2], ["identity"], rng)
    with pytest.raises(ValidationError):
        net(np.zeros((2, 4)))
    _, tape = net.forward(np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        net.backward(tape, np.zeros((2, 5)))
    with pytest.raises(ValidationError):
        Mlp([Dense(np.zeros((3, 2)), np.zeros(3)), Dense(np.zeros((1, 4)), np.zeros(1))])


def test_linear_chain_rule(rng):
    W = rng.normal(size=(3, 4))
    net = Mlp([Dense(W, rng.normal(size=3))])
    X = rng.normal(size=(2, 4))
    G = rng.normal(size=(2, 3))
    grads, dx = net.backward(net.forward(X)[1], G)
    np.testing.assert_allclose(dx, G @ W, atol=1e-14)
    np.testing.assert_allclose(grads[0], G.T @ X, atol=1e-14)


def test_last_bias_gradient_of_output_sum(rng):
    net = Mlp.glorot([4, 6, 3], ["tanh", "sigmoid"], rng)
    X = rng.normal(size=(5, 4))
    out, tape = net.forward(X)
    grads, _ = net.backward(tape, np.ones_like(out))
    np.testing.assert_allclose(grads[-1], (out * (1 - out)).sum(axis=0), atol=1e-14)


@pytest.mark.parametrize("act", sorted(ACTIVATIONS))
def test_gradient_check_per_activation(rng, act):
    net = Mlp.glorot([4, 5, 3], [act, act], rng)
    for p in net.params():
        p += rng.normal(scale=0.1, size=p.shape)  # nonzero biases too
    X, R = rng.normal(size=(3, 4)), rng.normal(size=(3, 3))
    assert max_relative_error(net, X, R) < 1e-4
    assert input_gradient_error(net, X, R) < 1e-4


def test_gradient_check_random_architectures(rng):
    acts = sorted(ACTIVATIONS)
    for _ in range(3):
        depth = int(rng.integers(1, 4))
        sizes = [int(s) for s in rng.integers(2, 7, size=depth + 1)]
        net = Mlp.glorot(sizes, list(rng.choice(acts, depth)), rng)
        X, R = rng.normal(size=(3, sizes[0])), rng.normal(size=(3, sizes[-1]))
        assert max_relative_error(net, X, R) < 1e-4


def test_backward_without_output_activation(rng):
    net = Mlp.glorot([3, 4, 1], ["tanh", "sigmoid"], rng)
    X = rng.normal(size=(5, 3))
    out, tape = net.forward(X)
    g = rng.normal(size=out.shape)
    full, _ = net.backward(tape, g)
    folded, _ = net.backward(tape, g * out * (1 - out), through_output_activation=False)
    for a, b in zip(full, folded):
        np.testing.assert_allclose(a, b, atol=1e-14)


def test_duplicated_rows_give_duplicated_input_grads(rng):
    net = Mlp.glorot([4, 8, 2], ["leaky_relu", "tanh"], rng)
    x = rng.normal(size=(1, 4))
    X = np.vstack([x, x])
    _, tape = net.forward(X)
    g = rng.normal(size=(1, 2))
    _, dx = net.backward(tape, np.vstack([g, g]))
    np.testing.assert_array_equal(dx[0], dx[1])


def test_forward_is_deterministic(rng):
    net = Mlp.glorot([6, 16, 3], ["relu", "identity"], rng)
    X = rng.normal(size=(8, 6))
    assert net(X).tobytes() == net(X).tobytes()


def test_glorot_bounds(rng):
    net = Mlp.glorot([100, 128, 256, 56], ["leaky_relu", "leaky_relu", "tanh"], rng)
    for layer in net.layers:
        bound = np.sqrt(6 / (layer.n_in + layer.n_out))
        assert np.abs(layer.W).max() <= bound
        assert not layer.b.any()


# ---- Adam ----------------------------------------------------------------


def test_adam_zero_gradient_keeps_params():
    p = [np.array([1.0, -2.0])]
    opt = Adam(p)
    opt.step(p, [np.zeros(2)])
    assert p[0].tolist() == [1.0, -2.0]
    assert opt.t == 1


def test_adam_first_step_magnitude_is_lr(rng):
    g = rng.normal(size=10) * 10.0 ** rng.integers(-3, 3, size=10)
    p = [np.zeros(10)]
    Adam(p, lr=0.01).step(p, [g])
    np.testing.assert_allclose(p[0], -0.01 * np.sign(g), rtol=1e-5)


def test_adam_descends_parabola():
    x = [np.array([1.0])]
    opt = Adam(x, lr=0.1, beta1=0.5, beta2=0.999)
    f = [1.0]
    for _ in range(10):
        opt.step(x, [2 * x[0]])
        f.append(float(x[0][0] ** 2))
    assert all(b < a for a, b in zip(f, f[1:]))


def test_adam_lr_zero_is_identity(rng):
    p = [rng.normal(size=(3, 3)), rng.normal(size=3)]
    before = [a.copy() for a in p]
    opt = Adam(p, lr=0.0)
    for _ in range(5):
        opt.step(p, [rng.normal(size=a.shape) for a in p])
    for a, b in zip(p, before):
        assert a.tobytes() == b.tobytes()


def test_adam_stays_finite_on_tiny_gradients():
    p = [np.array([1.0])]
    opt = Adam(p)
    for _ in range(100):
        opt.step(p, [np.array([1e-300])])
    assert np.isfinite(p[0]).all()


def test_model_file_round_trip(tmp_path, rng):
    net = Mlp.glorot([5, 7, 2], ["leaky_relu", "sigmoid"], rng)
    save_model(net, tmp_path / "m.bin", seed=3, epoch=12)
    back, header = load_model(tmp_path / "m.bin")
    assert header["epoch"] == 12 and header["activations"] == ["leaky_relu", "sigmoid"]
    for a, b in zip(net.params(), back.params()):
        assert a.tobytes() == b.tobytes()
    raw = (tmp_path / "m.bin").read_bytes()
    (tmp_path / "cut.bin").write_bytes(raw[:-8])
    with pytest.raises(ValueError):
        load_model(tmp_path / "cut.bin")
