"""Constrained gradient-descent fitting of UAF parameters to a target
activation.

A fit minimizes the RMSE of the approximation error over a uniform sample
grid. Parameters are partitioned into free (descended on), tied (closed-form
functions of a free parameter), and constant (frozen at their initial value).
Descent runs on the mean squared error — the same minimizer as RMSE with a
smooth gradient assembled from the analytic parameter partials — and reports
RMSE. Backtracking step-halving guarantees a monotone RMSE trace; there is no
randomness, so fits are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import uaf_eval as _k_eval
from ._backend import uaf_grad as _k_grad
from .core import LN2, PARAM_NAMES, A_RELU, PresetKind, UafParams
from .targets import TargetActivation, target_eval_batch

__all__ = [
    "Tie",
    "FitSpec",
    "FitResult",
    "fit",
    "fit_free",
    "builtin_spec",
    "BUILTIN_SPEC_NAMES",
]

_TIE_KINDS = ("const", "same", "recip", "offset")


@dataclass(frozen=True)
class Tie:
    """Closed-form constraint pinning one parameter.

    kinds: const  -> param = value       (no source)
           same   -> param = source
           recip  -> param = value / source
           offset -> param = source + value
    """

    param: str
    kind: str
    source: str | None = None
    value: float = 0.0

    def __post_init__(self) -> None:
        if self.param not in PARAM_NAMES:
            raise ValueError(f"tie parameter must be one of {PARAM_NAMES}, got {self.param!r}")
        if self.kind not in _TIE_KINDS:
            raise ValueError(f"tie kind must be one of {_TIE_KINDS}, got {self.kind!r}")
        if self.kind == "const":
            if self.source is not None:
                raise ValueError("const tie takes no source parameter")
        else:
            if self.source not in PARAM_NAMES:
                raise ValueError(
                    f"tie source must be one of {PARAM_NAMES}, got {self.source!r}"
                )
            if self.source == self.param:
                raise ValueError(f"tie cannot reference itself ({self.param})")
        value = float(self.value)
        if not math.isfinite(value):
            raise ValueError(f"tie value must be finite, got {value!r}")
        object.__setattr__(self, "value", value)

    def resolve(self, source_value: float) -> float:
        if self.kind == "const":
            return self.value
        if self.kind == "same":
            return source_value
        if self.kind == "recip":
            return self.value / source_value
        return source_value + self.value

    def d_source(self, source_value: float) -> float:
        """Derivative of the tied parameter w.r.t. its source."""
        if self.kind == "const":
            return 0.0
        if self.kind == "same" or self.kind == "offset":
            return 1.0
        return -self.value / (source_value * source_value)

    def to_dict(self) -> dict:
        out: dict = {"param": self.param, "kind": self.kind}
        if self.source is not None:
            out["source"] = self.source
        if self.kind != "same":
            out["value"] = self.value
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Tie":
        if not isinstance(data, dict):
            raise ValueError(f"tie must be an object, got {type(data).__name__}")
        known = {"param", "kind", "source", "value"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"tie contains unknown field(s): {', '.join(sorted(extra))}")
        if "param" not in data or "kind" not in data:
            raise ValueError("tie requires 'param' and 'kind' fields")
        return cls(
            param=data["param"],
            kind=data["kind"],
            source=data.get("source"),
            value=data.get("value", 0.0),
        )


def _kind_from_dict(data) -> PresetKind:
    if isinstance(data, str):
        return PresetKind.from_name(data)
    if isinstance(data, dict):
        extra = set(data) - {"name", "alpha"}
        if extra:
            raise ValueError(f"target contains unknown field(s): {', '.join(sorted(extra))}")
        if "name" not in data:
            raise ValueError("target requires a 'name' field")
        return PresetKind.from_name(data["name"], data.get("alpha"))
    raise ValueError(f"target must be a name or object, got {type(data).__name__}")


@dataclass(frozen=True)
class FitSpec:
    """A constrained fitting problem: which parameters move, how the rest are
    pinned, and the sample grid / optimizer settings."""

    target: TargetActivation
    free: tuple[str, ...]
    ties: tuple[Tie, ...]
    init: UafParams
    interval: tuple[float, float] = (-10.0, 10.0)
    n_samples: int = 2001
    max_iters: int = 100000
    learning_rate: float = 0.1
    tolerance: float = 1e-12

    def __post_init__(self) -> None:
        free = tuple(sorted(set(self.free), key=PARAM_NAMES.index))
        if len(free) != len(tuple(self.free)):
            raise ValueError(f"duplicate names in free set: {self.free}")
        for name in free:
            if name not in PARAM_NAMES:
                raise ValueError(f"free parameter must be one of {PARAM_NAMES}, got {name!r}")
        object.__setattr__(self, "free", free)
        ties = tuple(self.ties)
        tied_names = [t.param for t in ties]
        if len(set(tied_names)) != len(tied_names):
            raise ValueError(f"parameter tied more than once: {tied_names}")
        overlap = set(tied_names) & set(free)
        if overlap:
            raise ValueError(f"parameter(s) both free and tied: {', '.join(sorted(overlap))}")
        for t in ties:
            if t.kind != "const" and t.source not in free:
                raise ValueError(
                    f"tie source {t.source!r} for {t.param!r} must be a free parameter"
                )
        object.__setattr__(self, "ties", ties)
        lo, hi = float(self.interval[0]), float(self.interval[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError(f"interval must satisfy lo < hi (finite), got ({lo}, {hi})")
        object.__setattr__(self, "interval", (lo, hi))
        if int(self.n_samples) < 2:
            raise ValueError(f"n_samples must be >= 2, got {self.n_samples}")
        object.__setattr__(self, "n_samples", int(self.n_samples))
        if int(self.max_iters) < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        object.__setattr__(self, "max_iters", int(self.max_iters))
        if not (math.isfinite(self.learning_rate) and self.learning_rate > 0):
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (math.isfinite(self.tolerance) and self.tolerance >= 0):
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")

    def to_dict(self) -> dict:
        return {
            "target": {"name": self.target.kind.name, "alpha": self.target.kind.alpha},
            "free": list(self.free),
            "ties": [t.to_dict() for t in self.ties],
            "init": self.init.to_dict(),
            "interval": list(self.interval),
            "n_samples": self.n_samples,
            "max_iters": self.max_iters,
            "learning_rate": self.learning_rate,
            "tolerance": self.tolerance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FitSpec":
        if not isinstance(data, dict):
            raise ValueError(f"fit spec must be an object, got {type(data).__name__}")
        known = {
            "target", "free", "ties", "init", "interval",
            "n_samples", "max_iters", "learning_rate", "tolerance",
        }
        extra = set(data) - known
        if extra:
            raise ValueError(f"fit spec contains unknown field(s): {', '.join(sorted(extra))}")
        for req in ("target", "free", "init"):
            if req not in data:
                raise ValueError(f"fit spec requires a {req!r} field")
        kwargs: dict = {
            "target": TargetActivation(_kind_from_dict(data["target"])),
            "free": tuple(data["free"]),
            "ties": tuple(Tie.from_dict(t) for t in data.get("ties", [])),
            "init": UafParams.from_dict(data["init"]),
        }
        if "interval" in data:
            kwargs["interval"] = tuple(data["interval"])
        for name in ("n_samples", "max_iters", "learning_rate", "tolerance"):
            if name in data:
                kwargs[name] = data[name]
        return cls(**kwargs)


@dataclass(frozen=True)
class FitResult:
    """Best parameters found, their RMSE, and the monotone per-step trace."""

    params: UafParams
    rmse: float
    iterations: int
    converged: bool
    rmse_trace: tuple[float, ...] = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "rmse": self.rmse,
            "iterations": self.iterations,
            "converged": self.converged,
            "rmse_trace": list(self.rmse_trace),
        }


class _Objective:
    """Mean-squared-error objective over the sample grid, with its gradient
    chained through the ties onto the free parameters."""

    def __init__(self, spec: FitSpec):
        self.spec = spec
        self.grid = np.linspace(spec.interval[0], spec.interval[1], spec.n_samples)
        self.tvals = target_eval_batch(spec.target, self.grid)
        self.const = {
            name: getattr(spec.init, name)
            for name in PARAM_NAMES
            if name not in spec.free and name not in {t.param for t in spec.ties}
        }

    def assemble(self, theta: np.ndarray) -> UafParams | None:
        """Full parameter vector for the given free values; None when a tie
        or a non-finite free value makes the result invalid."""
        vals = dict(self.const)
        vals.update(zip(self.spec.free, (float(v) for v in theta)))
        try:
            for tie in self.spec.ties:
                src = 0.0 if tie.source is None else vals[tie.source]
                vals[tie.param] = tie.resolve(src)
            return UafParams(**vals)
        except (ValueError, ZeroDivisionError):
            return None

    def mse(self, params: UafParams) -> float:
        f = _k_eval(self.grid, *params.as_tuple())
        e = f - self.tvals
        return float(np.mean(e * e))

    def mse_and_grad(self, params: UafParams, theta: np.ndarray) -> tuple[float, np.ndarray]:
        f = _k_eval(self.grid, *params.as_tuple())
        e = f - self.tvals
        mse = float(np.mean(e * e))
        g6 = _k_grad(self.grid, *params.as_tuple())
        # d(mse)/d(param) for each of A..E (columns 1..5 of the kernel output).
        dmse = {
            name: 2.0 * float(np.mean(e * g6[:, 1 + j]))
            for j, name in enumerate(PARAM_NAMES)
        }
        vals = dict(zip(self.spec.free, theta))
        grad = np.zeros(len(self.spec.free))
        for i, name in enumerate(self.spec.free):
            g = dmse[name]
            for tie in self.spec.ties:
                if tie.source == name:
                    g += dmse[tie.param] * tie.d_source(float(vals[name]))
            grad[i] = g
        return mse, grad

    def curvature_scale(self, params: UafParams, theta: np.ndarray) -> np.ndarray:
        """Per-parameter curvature estimate (Gauss-Newton diagonal) used to
        scale the descent direction.

        The free parameters act on wildly different scales over a wide sample
        interval (df/dC ~ x^2 vs df/dE = 1), so a single step length either
        crawls in the flat directions or overshoots in the stiff one; dividing
        each gradient component by 2*mean((df/dv)^2) puts them on equal
        footing while keeping the direction a descent direction.
        """
        g6 = _k_grad(self.grid, *params.as_tuple())
        col = {name: g6[:, 1 + j] for j, name in enumerate(PARAM_NAMES)}
        vals = dict(zip(self.spec.free, theta))
        scale = np.empty(len(self.spec.free))
        for i, name in enumerate(self.spec.free):
            total = col[name].copy()
            for tie in self.spec.ties:
                if tie.source == name:
                    total += col[tie.param] * tie.d_source(float(vals[name]))
            scale[i] = max(2.0 * float(np.mean(total * total)), 1e-30)
        return scale


_MAX_HALVINGS = 60


def fit(spec: FitSpec) -> FitResult:
    """Gradient descent on the free parameters with backtracking step-halving.

    The descent direction is the gradient scaled per-parameter by the current
    curvature estimate (see _Objective.curvature_scale), refreshed after every
    accepted step. Each step first tries the current learning rate, halving it
    until the MSE stops increasing (so the RMSE trace is non-increasing);
    accepted steps grow the rate by 1.1x, capped at 10x the initial rate. A
    step whose RMSE improvement falls below spec.tolerance is discarded and
    the fit reports converged; a vanishing gradient also converges; exhausting
    max_iters does not.
    """
    obj = _Objective(spec)
    theta = np.array([getattr(spec.init, name) for name in spec.free], dtype=np.float64)
    params = obj.assemble(theta)
    if params is None:
        raise ValueError("initial parameters violate the ties (non-finite result)")

    cur_mse, cur_grad = obj.mse_and_grad(params, theta)
    trace = [math.sqrt(cur_mse)]
    lr = spec.learning_rate
    lr_cap = spec.learning_rate * 10.0
    converged = False
    iterations = 0

    for _ in range(spec.max_iters):
        if not np.any(cur_grad):
            converged = True
            break
        direction = cur_grad / obj.curvature_scale(params, theta)
        trial_theta = theta
        trial_params = None
        trial_mse = math.inf
        for _halving in range(_MAX_HALVINGS + 1):
            trial_theta = theta - lr * direction
            trial_params = obj.assemble(trial_theta)
            trial_mse = obj.mse(trial_params) if trial_params is not None else math.inf
            if trial_mse <= cur_mse and math.isfinite(trial_mse):
                break
            lr *= 0.5
        if not (math.isfinite(trial_mse) and trial_mse <= cur_mse):
            # No step length improves the objective: descent has stalled.
            converged = True
            break
        if math.sqrt(cur_mse) - math.sqrt(trial_mse) < spec.tolerance:
            # Progress below tolerance: already converged; the step is not
            # worth recording.
            converged = True
            break
        theta = trial_theta
        params = trial_params
        cur_mse, cur_grad = obj.mse_and_grad(params, theta)
        trace.append(math.sqrt(cur_mse))
        iterations += 1
        lr = min(lr * 1.1, lr_cap)

    return FitResult(
        params=params,
        rmse=math.sqrt(cur_mse),
        iterations=iterations,
        converged=converged,
        rmse_trace=tuple(trace),
    )


def fit_free(
    target: TargetActivation,
    init: UafParams,
    interval: tuple[float, float] = (-10.0, 10.0),
    **kwargs,
) -> FitResult:
    """Unconstrained fit: all five parameters free; same contract as fit."""
    spec = FitSpec(
        target=target,
        free=PARAM_NAMES,
        ties=(),
        init=init,
        interval=interval,
        **kwargs,
    )
    return fit(spec)


def _sigmoid_family() -> FitSpec:
    return FitSpec(
        target=TargetActivation(PresetKind("sigmoid")),
        free=("A",),
        ties=(Tie("B", "recip", "A", 0.5), Tie("D", "same", "A")),
        init=UafParams(1.0, 0.5, 0.0, 1.0, 0.0),
    )


def _tanh_family() -> FitSpec:
    return FitSpec(
        target=TargetActivation(PresetKind("tanh")),
        free=("A",),
        ties=(Tie("B", "recip", "A", 1.0), Tie("D", "same", "A")),
        init=UafParams(2.0, 0.5, 0.0, 2.0, -1.0),
    )


def _gaussian_family() -> FitSpec:
    return FitSpec(
        target=TargetActivation(PresetKind("gaussian")),
        free=("C",),
        ties=(),
        init=UafParams(0.0, 0.0, -0.5, 0.0, LN2),
    )


def _relu_family() -> FitSpec:
    # The relu RMSE decreases monotonically as A grows, so there is no finite
    # optimum; starting at the preset slope, A keeps growing until the RMSE
    # improvement per step drops below the tolerance.
    return FitSpec(
        target=TargetActivation(PresetKind("relu")),
        free=("A",),
        ties=(Tie("D", "offset", "A", -1.0),),
        init=UafParams(A_RELU, 0.0, 0.0, A_RELU - 1.0, 0.0),
    )


_BUILTIN_SPECS = {
    "sigmoid-family": _sigmoid_family,
    "tanh-family": _tanh_family,
    "gaussian-family": _gaussian_family,
    "relu-family": _relu_family,
}

BUILTIN_SPEC_NAMES = tuple(sorted(_BUILTIN_SPECS))


def builtin_spec(name: str) -> FitSpec:
    """Named fit family: one of sigmoid-family, tanh-family, gaussian-family,
    relu-family (each fits the single slope/shape constant with the other
    parameters tied or frozen as in the corresponding preset)."""
    try:
        factory = _BUILTIN_SPECS[name]
    except KeyError:
        raise ValueError(
            f"unknown builtin fit spec {name!r}; available: {', '.join(BUILTIN_SPEC_NAMES)}"
        ) from None
    return factory()
