"""Minimal dense feed-forward network with affine-free batch normalization
BN(x) = (x - mu)/sigma (no learned scale or shift) and a single trainable UAF
shared across every neuron and layer.

The UAF parameter gradients are the sums, over all activation sites, of the
analytic partials scaled by the upstream gradient, so the activation trains by
ordinary backpropagation alongside the weights. Everything is seeded and
deterministic: identical config + dataset + seed reproduce a bitwise-identical
TrainReport.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ._backend import uaf_eval as _k_eval
from ._backend import uaf_grad as _k_grad
from .core import PARAM_NAMES, PresetKind, UafParams, preset
from .datasets import Dataset
from .targets import TargetActivation

__all__ = [
    "FixedActivation",
    "TrainableUaf",
    "SgdConfig",
    "AdamConfig",
    "NetworkConfig",
    "TrainReport",
    "Network",
    "train",
]

_BN_EPSILON = 1e-5
_BN_MOMENTUM = 0.1


@dataclass(frozen=True)
class FixedActivation:
    """Non-trainable activation: the frozen UAF preset for the kind, or the
    exact closed-form target when exact=True."""

    kind: PresetKind
    exact: bool = False

    def to_dict(self) -> dict:
        return {
            "type": "fixed",
            "kind": {"name": self.kind.name, "alpha": self.kind.alpha},
            "exact": self.exact,
        }


@dataclass(frozen=True)
class TrainableUaf:
    """Trainable activation: one shared UAF parameter vector for the whole
    network, initialized from init."""

    init: UafParams

    def to_dict(self) -> dict:
        return {"type": "trainable", "init": self.init.to_dict()}


def _activation_from_dict(data: dict):
    if not isinstance(data, dict) or "type" not in data:
        raise ValueError("activation must be an object with a 'type' field")
    if data["type"] == "trainable":
        if "init" not in data:
            raise ValueError("trainable activation requires an 'init' field")
        return TrainableUaf(init=UafParams.from_dict(data["init"]))
    if data["type"] == "fixed":
        kind = data.get("kind")
        if isinstance(kind, str):
            kind = {"name": kind}
        if not isinstance(kind, dict) or "name" not in kind:
            raise ValueError("fixed activation requires a 'kind' with a 'name'")
        return FixedActivation(
            kind=PresetKind.from_name(kind["name"], kind.get("alpha")),
            exact=bool(data.get("exact", False)),
        )
    raise ValueError(f"activation type must be 'fixed' or 'trainable', got {data['type']!r}")


@dataclass(frozen=True)
class SgdConfig:
    learning_rate: float = 0.01

    def to_dict(self) -> dict:
        return {"kind": "sgd", "learning_rate": self.learning_rate}


@dataclass(frozen=True)
class AdamConfig:
    learning_rate: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8

    def to_dict(self) -> dict:
        return {
            "kind": "adam",
            "learning_rate": self.learning_rate,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "epsilon": self.epsilon,
        }


def _optimizer_from_dict(data: dict):
    if not isinstance(data, dict) or "kind" not in data:
        raise ValueError("optimizer must be an object with a 'kind' field")
    kind = data["kind"]
    if kind == "sgd":
        return SgdConfig(learning_rate=float(data.get("learning_rate", 0.01)))
    if kind == "adam":
        return AdamConfig(
            learning_rate=float(data.get("learning_rate", 0.001)),
            beta1=float(data.get("beta1", 0.9)),
            beta2=float(data.get("beta2", 0.999)),
            epsilon=float(data.get("epsilon", 1e-8)),
        )
    raise ValueError(f"optimizer kind must be 'sgd' or 'adam', got {kind!r}")


@dataclass(frozen=True)
class NetworkConfig:
    """Layer sizes (input, hidden..., output), activation choice, batch-norm
    flag for the hidden layers, optimizer, and the training-loop settings."""

    layer_sizes: tuple[int, ...]
    activation: FixedActivation | TrainableUaf
    use_batch_norm: bool = True
    output_activation: str = "identity"
    seed: int = 0
    optimizer: SgdConfig | AdamConfig = field(default_factory=SgdConfig)
    batch_size: int = 32
    epochs: int = 10
    # Step size for the shared activation parameters; None means the same
    # rate the optimizer uses for weights. The shared parameters accumulate
    # gradients from every activation site, so a damped rate is often needed
    # to keep them from outrunning the weights.
    uaf_learning_rate: float | None = None

    def __post_init__(self) -> None:
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 3:
            raise ValueError(
                f"need at least one hidden layer (>= 3 sizes), got {sizes}"
            )
        if any(s < 1 for s in sizes):
            raise ValueError(f"all layer sizes must be >= 1, got {sizes}")
        object.__setattr__(self, "layer_sizes", sizes)
        if self.output_activation not in ("identity", "none"):
            raise ValueError(
                f"output_activation must be 'identity' or 'none', got {self.output_activation!r}"
            )
        if int(self.batch_size) < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if int(self.epochs) < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        object.__setattr__(self, "batch_size", int(self.batch_size))
        object.__setattr__(self, "epochs", int(self.epochs))
        object.__setattr__(self, "seed", int(self.seed))
        if self.uaf_learning_rate is not None:
            rate = float(self.uaf_learning_rate)
            if not (math.isfinite(rate) and rate > 0.0):
                raise ValueError(
                    f"uaf_learning_rate must be a positive finite number, got {self.uaf_learning_rate}"
                )
            object.__setattr__(self, "uaf_learning_rate", rate)

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "activation": self.activation.to_dict(),
            "use_batch_norm": self.use_batch_norm,
            "output_activation": self.output_activation,
            "seed": self.seed,
            "optimizer": self.optimizer.to_dict(),
            "batch_size": self.batch_size,
            "epochs": self.epochs,
            "uaf_learning_rate": self.uaf_learning_rate,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NetworkConfig":
        if not isinstance(data, dict):
            raise ValueError(f"network config must be an object, got {type(data).__name__}")
        known = {
            "layer_sizes", "activation", "use_batch_norm", "output_activation",
            "seed", "optimizer", "batch_size", "epochs", "uaf_learning_rate",
        }
        extra = set(data) - known
        if extra:
            raise ValueError(
                f"network config contains unknown field(s): {', '.join(sorted(extra))}"
            )
        for req in ("layer_sizes", "activation"):
            if req not in data:
                raise ValueError(f"network config requires a {req!r} field")
        kwargs: dict = {
            "layer_sizes": tuple(data["layer_sizes"]),
            "activation": _activation_from_dict(data["activation"]),
        }
        if "optimizer" in data:
            kwargs["optimizer"] = _optimizer_from_dict(data["optimizer"])
        for name in (
            "use_batch_norm", "output_activation", "seed", "batch_size",
            "epochs", "uaf_learning_rate",
        ):
            if name in data:
                kwargs[name] = data[name]
        return cls(**kwargs)


@dataclass(frozen=True)
class TrainReport:
    """Per-epoch traces plus the UAF parameter trajectory (trainable runs)."""

    loss_trace: tuple[float, ...]
    metric_trace: tuple[float, ...]
    uaf_trajectory: tuple[tuple[int, UafParams], ...] | None
    wall_time: float
    diverged: bool = False
    diverged_epoch: int | None = None

    def to_dict(self) -> dict:
        return {
            "loss_trace": list(self.loss_trace),
            "metric_trace": list(self.metric_trace),
            "uaf_trajectory": None
            if self.uaf_trajectory is None
            else [{"epoch": e, "params": p.to_dict()} for e, p in self.uaf_trajectory],
            "wall_time": self.wall_time,
            "diverged": self.diverged,
            "diverged_epoch": self.diverged_epoch,
        }


@dataclass
class Gradients:
    """Exact loss gradients from one backward pass."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]
    uaf: np.ndarray | None  # (5,) d loss / d (A, B, C, D, E), or None if fixed


class _BatchNorm:
    """Affine-free batch normalization (x - mu)/sigma per feature, with the
    denominator floored at epsilon. Training uses batch statistics and updates
    running ones; inference uses the running statistics."""

    def __init__(self, n_features: int):
        self.running_mu = np.zeros(n_features)
        self.running_sigma = np.ones(n_features)

    def forward(self, h: np.ndarray, training: bool):
        if training:
            mu = h.mean(axis=0)
            sigma = h.std(axis=0)
            self.running_mu = (1 - _BN_MOMENTUM) * self.running_mu + _BN_MOMENTUM * mu
            self.running_sigma = (
                1 - _BN_MOMENTUM
            ) * self.running_sigma + _BN_MOMENTUM * sigma
        else:
            mu = self.running_mu
            sigma = self.running_sigma
        denom = np.maximum(sigma, _BN_EPSILON)
        y = (h - mu) / denom
        return y, (y, sigma, denom)

    @staticmethod
    def backward(g: np.ndarray, cache) -> np.ndarray:
        """Gradient through training-mode normalization.

        With s = max(sigma, eps): d/dh = (g - mean(g))/s - y*mean(g*y)/s,
        where the second (sigma-path) term is dropped on features where the
        floor is active (there s is constant w.r.t. h).
        """
        y, sigma, denom = cache
        g_mean = g.mean(axis=0)
        gy_mean = (g * y).mean(axis=0)
        active = sigma > _BN_EPSILON
        return (g - g_mean - np.where(active, y * gy_mean, 0.0)) / denom


class Network:
    """Dense MLP with per-hidden-layer batch norm and a shared activation.

    task selects the loss/metric pair: mean squared error + RMSE for
    "regression", softmax cross-entropy + accuracy for "classification".
    """

    def __init__(self, config: NetworkConfig, task: str = "regression"):
        if task not in ("regression", "classification"):
            raise ValueError(f"task must be regression or classification, got {task!r}")
        self.config = config
        self.task = task
        self.rng = np.random.default_rng(config.seed)
        sizes = config.layer_sizes
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = math.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(self.rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self.n_hidden = len(sizes) - 2
        self.batch_norms = (
            [_BatchNorm(sizes[i + 1]) for i in range(self.n_hidden)]
            if config.use_batch_norm
            else None
        )
        if isinstance(config.activation, TrainableUaf):
            self.uaf = np.array(config.activation.init.as_tuple())
            self._fixed_params = None
            self._fixed_target = None
        else:
            self.uaf = None
            if config.activation.exact:
                self._fixed_params = None
                self._fixed_target = TargetActivation(config.activation.kind)
            else:
                self._fixed_params = np.array(preset(config.activation.kind).as_tuple())
                self._fixed_target = None
        self._opt_state: dict | None = None

    # -- activation ---------------------------------------------------------

    def uaf_params(self) -> UafParams | None:
        """Current shared UAF parameters (None for fixed activations)."""
        if self.uaf is None:
            if self._fixed_params is None:
                return None
            return UafParams(*self._fixed_params)
        return UafParams(*self.uaf)

    def _act_forward(self, y: np.ndarray) -> np.ndarray:
        if self._fixed_target is not None:
            return self._fixed_target(y)
        params = self.uaf if self.uaf is not None else self._fixed_params
        return _k_eval(y.ravel(), *params).reshape(y.shape)

    def _act_backward(self, y: np.ndarray, upstream: np.ndarray):
        """Returns (d loss/d y, d loss/d uaf-params or None)."""
        if self._fixed_target is not None:
            return upstream * self._fixed_target.derivative(y), None
        params = self.uaf if self.uaf is not None else self._fixed_params
        g6 = _k_grad(y.ravel(), *params)
        d_y = (upstream.ravel() * g6[:, 0]).reshape(y.shape)
        if self.uaf is None:
            return d_y, None
        d_uaf = g6[:, 1:].T @ upstream.ravel()
        return d_y, d_uaf

    # -- forward / backward -------------------------------------------------

    def forward(self, batch: np.ndarray, training: bool = False):
        """Returns (per-layer post-activation list, output). The list holds
        the input followed by each hidden layer's activation output."""
        batch = np.asarray(batch, dtype=np.float64)
        if batch.ndim != 2 or batch.shape[1] != self.config.layer_sizes[0]:
            raise ValueError(
                f"batch must have shape (n, {self.config.layer_sizes[0]}), got {batch.shape}"
            )
        activations = [batch]
        self._cache = []
        a = batch
        for i in range(self.n_hidden):
            h = a @ self.weights[i] + self.biases[i]
            if self.batch_norms is not None:
                y, bn_cache = self.batch_norms[i].forward(h, training)
            else:
                y, bn_cache = h, None
            a = self._act_forward(y)
            self._cache.append((y, bn_cache))
            activations.append(a)
        output = a @ self.weights[-1] + self.biases[-1]
        return activations, output

    def backward(self, batch: np.ndarray, targets: np.ndarray) -> Gradients:
        """Exact gradients of the configured loss over the batch."""
        targets = np.asarray(targets, dtype=np.float64)
        activations, output = self.forward(batch, training=True)
        if targets.shape != output.shape:
            raise ValueError(
                f"targets must have shape {output.shape}, got {targets.shape}"
            )
        _, d_out = self._loss_and_grad(output, targets)
        return self._backward_from(activations, d_out)

    def _backward_from(self, activations: list[np.ndarray], d_out: np.ndarray) -> Gradients:
        w_grads: list[np.ndarray] = [np.empty(0)] * len(self.weights)
        b_grads: list[np.ndarray] = [np.empty(0)] * len(self.biases)
        uaf_grad = np.zeros(5) if self.uaf is not None else None

        w_grads[-1] = activations[-1].T @ d_out
        b_grads[-1] = d_out.sum(axis=0)
        g = d_out @ self.weights[-1].T
        for i in range(self.n_hidden - 1, -1, -1):
            y, bn_cache = self._cache[i]
            g, d_uaf = self._act_backward(y, g)
            if d_uaf is not None:
                uaf_grad += d_uaf
            if self.batch_norms is not None:
                g = _BatchNorm.backward(g, bn_cache)
            w_grads[i] = activations[i].T @ g
            b_grads[i] = g.sum(axis=0)
            if i > 0:
                g = g @ self.weights[i].T
        return Gradients(weights=w_grads, biases=b_grads, uaf=uaf_grad)

    # -- loss / metric ------------------------------------------------------

    def _loss_and_grad(self, output: np.ndarray, targets: np.ndarray):
        if self.task == "regression":
            diff = output - targets
            loss = float(np.mean(diff * diff))
            return loss, 2.0 * diff / diff.size
        # Softmax cross-entropy, numerically stable via the shifted logsumexp.
        shifted = output - output.max(axis=1, keepdims=True)
        log_z = np.log(np.exp(shifted).sum(axis=1, keepdims=True))
        log_p = shifted - log_z
        n = output.shape[0]
        loss = float(-np.sum(targets * log_p) / n)
        return loss, (np.exp(log_p) - targets) / n

    def metric(self, output: np.ndarray, targets: np.ndarray) -> float:
        """Validation metric: RMSE for regression, accuracy for classification."""
        if self.task == "regression":
            diff = output - targets
            return float(np.sqrt(np.mean(diff * diff)))
        return float(np.mean(output.argmax(axis=1) == targets.argmax(axis=1)))

    # -- optimization -------------------------------------------------------

    def _param_tensors(self) -> list[np.ndarray]:
        tensors = self.weights + self.biases
        if self.uaf is not None:
            tensors.append(self.uaf)
        return tensors

    def _grad_tensors(self, grads: Gradients) -> list[np.ndarray]:
        tensors = grads.weights + grads.biases
        if grads.uaf is not None:
            tensors.append(grads.uaf)
        return tensors

    def _tensor_rates(self, n_tensors: int) -> list[float]:
        lr = self.config.optimizer.learning_rate
        rates = [lr] * n_tensors
        if self.uaf is not None and self.config.uaf_learning_rate is not None:
            rates[-1] = self.config.uaf_learning_rate
        return rates

    def apply_gradients(self, grads: Gradients) -> None:
        params = self._param_tensors()
        gs = self._grad_tensors(grads)
        rates = self._tensor_rates(len(params))
        opt = self.config.optimizer
        if isinstance(opt, SgdConfig):
            for p, g, rate in zip(params, gs, rates):
                p -= rate * g
            return
        if self._opt_state is None:
            self._opt_state = {
                "t": 0,
                "m": [np.zeros_like(p) for p in params],
                "v": [np.zeros_like(p) for p in params],
            }
        state = self._opt_state
        state["t"] += 1
        t = state["t"]
        for i, (p, g) in enumerate(zip(params, gs)):
            state["m"][i] = opt.beta1 * state["m"][i] + (1 - opt.beta1) * g
            state["v"][i] = opt.beta2 * state["v"][i] + (1 - opt.beta2) * g * g
            m_hat = state["m"][i] / (1 - opt.beta1**t)
            v_hat = state["v"][i] / (1 - opt.beta2**t)
            p -= rates[i] * m_hat / (np.sqrt(v_hat) + opt.epsilon)


def train(config: NetworkConfig, dataset: Dataset) -> TrainReport:
    """Seeded mini-batch training; returns per-epoch traces, the UAF
    trajectory when the activation is trainable, and a divergence marker
    (with the failing epoch) when the loss leaves the finite range."""
    start = time.perf_counter()
    net = Network(config, task=dataset.kind)
    train_idx, val_idx, _ = dataset.split_indices()
    if len(train_idx) == 0 or len(val_idx) == 0:
        raise ValueError("dataset split leaves an empty train or validation set")
    x_train = dataset.inputs[train_idx]
    y_train = dataset.targets[train_idx]
    x_val = dataset.inputs[val_idx]
    y_val = dataset.targets[val_idx]

    loss_trace: list[float] = []
    metric_trace: list[float] = []
    trajectory: list[tuple[int, UafParams]] | None = None
    if net.uaf is not None:
        trajectory = [(0, net.uaf_params())]
    diverged = False
    diverged_epoch: int | None = None

    for epoch in range(1, config.epochs + 1):
        order = net.rng.permutation(len(x_train))
        batch_losses: list[float] = []
        for lo in range(0, len(order), config.batch_size):
            sel = order[lo : lo + config.batch_size]
            xb, yb = x_train[sel], y_train[sel]
            # Divergence is detected from the loss value itself, so the
            # intermediate overflow warnings on an exploding run are noise.
            with np.errstate(over="ignore", invalid="ignore"):
                activations, output = net.forward(xb, training=True)
                loss, d_out = net._loss_and_grad(output, yb)
                if not math.isfinite(loss):
                    diverged = True
                    diverged_epoch = epoch
                    break
                grads = net._backward_from(activations, d_out)
                net.apply_gradients(grads)
            batch_losses.append(loss)
        if diverged:
            break
        loss_trace.append(float(np.mean(batch_losses)))
        _, val_out = net.forward(x_val, training=False)
        metric_trace.append(net.metric(val_out, y_val))
        if trajectory is not None:
            trajectory.append((epoch, net.uaf_params()))

    return TrainReport(
        loss_trace=tuple(loss_trace),
        metric_trace=tuple(metric_trace),
        uaf_trajectory=None if trajectory is None else tuple(trajectory),
        wall_time=time.perf_counter() - start,
        diverged=diverged,
        diverged_epoch=diverged_epoch,
    )
