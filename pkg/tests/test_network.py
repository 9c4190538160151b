"""Unit tests for the dense network: forward, backward, batch norm, and the
training loop."""

import math

import numpy as np
import pytest

import uafkit as uk
from uafkit.network import (
    AdamConfig,
    FixedActivation,
    Network,
    NetworkConfig,
    SgdConfig,
    TrainableUaf,
    train,
)
from uafkit.datasets import Dataset


def _identity_uaf():
    return TrainableUaf(uk.preset(uk.IDENTITY))


# --- forward ------------------------------------------------------------------


def test_forward_zero_network_outputs_zero():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 2),
        activation=FixedActivation(uk.IDENTITY, exact=True),
        use_batch_norm=False,
    )
    net = Network(cfg)
    for w in net.weights:
        w[:] = 0.0
    _, out = net.forward(np.ones((5, 3)))
    assert np.array_equal(out, np.zeros((5, 2)))


def test_forward_identity_chain_passes_input_through():
    cfg = NetworkConfig(
        layer_sizes=(1, 1, 1),
        activation=_identity_uaf(),
        use_batch_norm=False,
    )
    net = Network(cfg)
    net.weights[0][:] = 1.0
    net.weights[1][:] = 1.0
    net.biases[0][:] = 0.0
    net.biases[1][:] = 0.0
    x = np.array([[0.3], [-2.0], [5.5]])
    _, out = net.forward(x)
    assert np.max(np.abs(out - x)) < 1e-12


def test_forward_rejects_bad_batch_width():
    cfg = NetworkConfig(layer_sizes=(3, 4, 2), activation=_identity_uaf())
    net = Network(cfg)
    with pytest.raises(ValueError):
        net.forward(np.ones((5, 4)))


def test_batch_norm_normalizes_small_batch():
    cfg = NetworkConfig(
        layer_sizes=(1, 1, 1),
        activation=FixedActivation(uk.IDENTITY, exact=True),
        use_batch_norm=True,
    )
    net = Network(cfg)
    net.weights[0][:] = 1.0
    net.biases[0][:] = 0.0
    acts, _ = net.forward(np.array([[1.0], [2.0], [3.0]]), training=True)
    normalized = acts[1][:, 0]
    assert abs(normalized.mean()) < 1e-9
    assert abs(normalized.std() - 1.0) < 1e-9


def test_batch_norm_invariant_on_random_net():
    cfg = NetworkConfig(
        layer_sizes=(6, 5, 4, 2),
        activation=FixedActivation(uk.IDENTITY, exact=True),
        use_batch_norm=True,
        seed=13,
    )
    net = Network(cfg)
    rng = np.random.default_rng(0)
    acts, _ = net.forward(rng.normal(size=(64, 6)) * 3.0 + 1.0, training=True)
    for layer in acts[1:]:
        means = layer.mean(axis=0)
        stds = layer.std(axis=0)
        assert np.max(np.abs(means)) < 1e-7
        assert np.max(np.abs(stds - 1.0)) <= 1e-7


def test_inference_uses_running_statistics():
    cfg = NetworkConfig(
        layer_sizes=(2, 3, 1),
        activation=FixedActivation(uk.IDENTITY, exact=True),
        use_batch_norm=True,
        seed=1,
    )
    net = Network(cfg)
    rng = np.random.default_rng(2)
    batch = rng.normal(size=(32, 2))
    net.forward(batch, training=True)
    # a single inference row works (batch statistics would be degenerate)
    _, out = net.forward(batch[:1], training=False)
    assert out.shape == (1, 1)
    assert np.all(np.isfinite(out))


# --- backward -----------------------------------------------------------------


def _fd_check(net, x, y, rel_tol):
    """Central finite differences over every parameter tensor."""
    grads = net.backward(x, y)
    tensors = net.weights + net.biases + ([net.uaf] if net.uaf is not None else [])
    grad_tensors = grads.weights + grads.biases + (
        [grads.uaf] if grads.uaf is not None else []
    )
    h = 1e-6

    def loss():
        _, out = net.forward(x, training=True)
        val, _ = net._loss_and_grad(out, y)
        return val

    for tensor, grad in zip(tensors, grad_tensors):
        flat = tensor.ravel()
        gflat = np.asarray(grad).ravel()
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up = loss()
            flat[i] = keep - h
            down = loss()
            flat[i] = keep
            fd = (up - down) / (2 * h)
            an = gflat[i]
            if max(abs(fd), abs(an)) <= 1e-6:
                assert abs(fd - an) < 1e-7
            else:
                assert abs(fd - an) <= rel_tol * max(abs(fd), abs(an))


def test_gradients_match_finite_differences():
    cfg = NetworkConfig(
        layer_sizes=(4, 3, 2),
        activation=TrainableUaf(uk.UafParams(1.1, 0.2, -0.05, 0.8, 0.1)),
        use_batch_norm=True,
        seed=5,
    )
    net = Network(cfg)
    rng = np.random.default_rng(8)
    x = rng.normal(size=(8, 4))
    y = rng.normal(size=(8, 2))
    _fd_check(net, x, y, rel_tol=1e-4)


def test_classification_gradients_match_finite_differences():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 3),
        activation=TrainableUaf(uk.preset(uk.TANH)),
        use_batch_norm=False,
        seed=6,
    )
    net = Network(cfg, task="classification")
    rng = np.random.default_rng(9)
    x = rng.normal(size=(6, 3))
    y = np.eye(3)[rng.integers(0, 3, size=6)]
    _fd_check(net, x, y, rel_tol=1e-4)


def test_zero_residual_gives_zero_gradients():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 2),
        activation=_identity_uaf(),
        use_batch_norm=False,
        seed=3,
    )
    net = Network(cfg)
    rng = np.random.default_rng(4)
    x = rng.normal(size=(10, 3))
    _, out = net.forward(x, training=True)
    grads = net.backward(x, out.copy())
    for g in grads.weights + grads.biases + [grads.uaf]:
        assert np.max(np.abs(g)) < 1e-10


def test_frozen_activation_emits_no_uaf_gradients():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 2),
        activation=FixedActivation(uk.TANH),
        use_batch_norm=False,
    )
    net = Network(cfg)
    rng = np.random.default_rng(1)
    grads = net.backward(rng.normal(size=(5, 3)), rng.normal(size=(5, 2)))
    assert grads.uaf is None


def test_shared_uaf_is_one_vector_across_layers():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 4, 2),
        activation=TrainableUaf(uk.preset(uk.TANH)),
        use_batch_norm=False,
        seed=2,
    )
    net = Network(cfg)
    rng = np.random.default_rng(3)
    x = rng.normal(size=(6, 3))
    acts, _ = net.forward(x)
    # every hidden layer applies exactly the current shared parameter vector
    p = net.uaf_params()
    a = acts[0]
    for i in range(net.n_hidden):
        pre = a @ net.weights[i] + net.biases[i]
        expected = uk.eval_batch(p, pre.ravel()).reshape(pre.shape)
        assert np.array_equal(acts[i + 1], expected)
        a = acts[i + 1]
    # perturbing the single vector shifts every site identically
    net.uaf[4] += 0.25
    acts2, _ = net.forward(x)
    for i in range(1, len(acts)):
        assert np.max(np.abs(acts2[i][...] - acts[i])) > 0.0
    assert net.uaf_params().E == p.E + 0.25


def test_identity_init_matches_exact_identity_network():
    common = dict(layer_sizes=(5, 6, 3), use_batch_norm=True, seed=17)
    net_uaf = Network(NetworkConfig(activation=_identity_uaf(), **common))
    net_fix = Network(
        NetworkConfig(activation=FixedActivation(uk.IDENTITY, exact=True), **common)
    )
    rng = np.random.default_rng(18)
    x = rng.normal(size=(16, 5))
    _, out_uaf = net_uaf.forward(x, training=True)
    _, out_fix = net_fix.forward(x, training=True)
    assert np.max(np.abs(out_uaf - out_fix)) < 1e-9


# --- config and report types -----------------------------------------------------


def test_config_validation():
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=(3, 2), activation=_identity_uaf())
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=(3, 0, 2), activation=_identity_uaf())
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=(3, 4, 2), activation=_identity_uaf(),
                      output_activation="relu")
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=(3, 4, 2), activation=_identity_uaf(), epochs=0)
    with pytest.raises(ValueError):
        NetworkConfig(layer_sizes=(3, 4, 2), activation=_identity_uaf(),
                      uaf_learning_rate=-1.0)


def test_config_json_round_trip():
    cfg = NetworkConfig(
        layer_sizes=(4, 8, 2),
        activation=TrainableUaf(uk.preset(uk.SIGMOID)),
        optimizer=AdamConfig(learning_rate=0.002),
        batch_size=16,
        epochs=3,
        uaf_learning_rate=1e-4,
        seed=42,
    )
    again = NetworkConfig.from_dict(cfg.to_dict())
    assert again == cfg
    with pytest.raises(ValueError):
        NetworkConfig.from_dict({**cfg.to_dict(), "momentum": 0.9})


# --- training ----------------------------------------------------------------------


def _linear_dataset(seed=0, n=400):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 3))
    w = rng.normal(size=(3, 2))
    b = rng.normal(size=2)
    return Dataset(inputs=x, targets=x @ w + b, kind="regression")


def test_train_linear_regression_to_small_error():
    # no batch norm: its per-batch statistics would jitter the affine map and
    # floor the loss far above the exact solution
    cfg = NetworkConfig(
        layer_sizes=(3, 8, 2),
        activation=FixedActivation(uk.IDENTITY, exact=True),
        use_batch_norm=False,
        optimizer=AdamConfig(learning_rate=0.01),
        batch_size=32,
        epochs=200,
        seed=0,
    )
    report = train(cfg, _linear_dataset())
    assert not report.diverged
    assert len(report.loss_trace) == 200
    assert math.sqrt(report.loss_trace[-1]) < 1e-2
    assert report.uaf_trajectory is None


def test_train_records_uaf_trajectory():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 2),
        activation=_identity_uaf(),
        epochs=3,
        seed=1,
    )
    report = train(cfg, _linear_dataset(n=100))
    assert report.uaf_trajectory is not None
    epochs = [e for e, _ in report.uaf_trajectory]
    assert epochs == [0, 1, 2, 3]
    assert report.uaf_trajectory[0][1] == uk.preset(uk.IDENTITY)
    assert len(report.metric_trace) == 3


def test_train_is_bitwise_deterministic():
    cfg = NetworkConfig(
        layer_sizes=(3, 5, 2),
        activation=_identity_uaf(),
        optimizer=AdamConfig(),
        epochs=4,
        seed=7,
    )
    a = train(cfg, _linear_dataset(seed=2))
    b = train(cfg, _linear_dataset(seed=2))
    assert a.loss_trace == b.loss_trace
    assert a.metric_trace == b.metric_trace
    assert a.uaf_trajectory == b.uaf_trajectory


def test_train_reports_divergence_with_epoch():
    cfg = NetworkConfig(
        layer_sizes=(3, 4, 2),
        activation=_identity_uaf(),
        optimizer=SgdConfig(learning_rate=1e9),
        epochs=5,
        seed=0,
    )
    report = train(cfg, _linear_dataset(n=100))
    assert report.diverged
    assert report.diverged_epoch == 1


def test_train_report_serializes():
    cfg = NetworkConfig(layer_sizes=(3, 4, 2), activation=_identity_uaf(),
                        epochs=2, seed=0)
    report = train(cfg, _linear_dataset(n=80))
    data = report.to_dict()
    assert set(data) >= {"loss_trace", "metric_trace", "uaf_trajectory",
                         "wall_time", "diverged", "diverged_epoch"}
    assert len(data["uaf_trajectory"]) == 3
