"""Core types and evaluation of the five-parameter universal activation
function (UAF)

    f(x) = ln(1 + e^{A(x+B) + Cx^2}) - ln(1 + e^{D(x-B)}) + E

with its analytic first derivatives and the preset parameter table that makes
the UAF reproduce eight classic activation functions.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from ._backend import uaf_eval as _k_eval
from ._backend import uaf_grad as _k_grad

__all__ = [
    "UafParams",
    "UafGradient",
    "PresetKind",
    "UafOverflowError",
    "PARAM_NAMES",
    "PRESET_NAMES",
    "A_STEP",
    "A_SIGMOID",
    "A_TANH",
    "A_RELU",
    "C_GAUSSIAN",
    "LN2",
    "eval_naive",
    "eval_stable",
    "grad",
    "preset",
    "eval_batch",
]

PARAM_NAMES = ("A", "B", "C", "D", "E")

# Reference constants for the preset table.
A_STEP = 70.9992
A_SIGMOID = 1.01605291
A_TANH = 2.12616013
A_RELU = 70.9992
C_GAUSSIAN = -0.61341425
LN2 = math.log(2.0)

# Largest z for which e^z is a finite float64; beyond it the naive form
# evaluates ln(inf).
_EXP_MAX = math.log(sys.float_info.max)


class UafOverflowError(OverflowError):
    """Raised by eval_naive when an exponent argument leaves the safe range."""


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be a finite real number, got {value!r}")
    return value


@dataclass(frozen=True)
class UafParams:
    """The five parameters (A, B, C, D, E); all finite reals."""

    A: float
    B: float
    C: float
    D: float
    E: float

    def __post_init__(self) -> None:
        for name in PARAM_NAMES:
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.A, self.B, self.C, self.D, self.E)

    def to_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "UafParams":
        if not isinstance(data, dict):
            raise ValueError(f"parameters must be an object with keys A..E, got {type(data).__name__}")
        missing = [n for n in PARAM_NAMES if n not in data]
        if missing:
            raise ValueError(f"parameters missing field(s): {', '.join(missing)}")
        extra = [k for k in data if k not in PARAM_NAMES]
        if extra:
            raise ValueError(f"parameters contain unknown field(s): {', '.join(map(str, extra))}")
        return cls(**{n: data[n] for n in PARAM_NAMES})


@dataclass(frozen=True)
class UafGradient:
    """First derivatives of f at one point: d_x plus the five parameter partials."""

    d_x: float
    d_A: float
    d_B: float
    d_C: float
    d_D: float
    d_E: float

    def as_tuple(self) -> tuple[float, float, float, float, float, float]:
        return (self.d_x, self.d_A, self.d_B, self.d_C, self.d_D, self.d_E)


PRESET_NAMES = (
    "identity",
    "step",
    "sigmoid",
    "tanh",
    "relu",
    "leaky_relu",
    "softplus",
    "gaussian",
)


@dataclass(frozen=True)
class PresetKind:
    """One of the eight classic activations; leaky_relu carries its slope alpha."""

    name: str
    alpha: float | None = None

    def __post_init__(self) -> None:
        if self.name not in PRESET_NAMES:
            raise ValueError(
                f"unknown preset kind {self.name!r}; expected one of {', '.join(PRESET_NAMES)}"
            )
        if self.name == "leaky_relu":
            if self.alpha is None:
                raise ValueError("leaky_relu requires an alpha in (0, 0.1]")
            alpha = _require_finite("alpha", self.alpha)
            if not 0.0 < alpha <= 0.1:
                raise ValueError(f"leaky_relu alpha must be in (0, 0.1], got {alpha}")
            object.__setattr__(self, "alpha", alpha)
        elif self.alpha is not None:
            raise ValueError(f"{self.name} takes no alpha")

    @classmethod
    def from_name(cls, name: str, alpha: float | None = None) -> "PresetKind":
        if name == "leaky_relu":
            return cls(name, 0.1 if alpha is None else alpha)
        return cls(name)

    def label(self) -> str:
        if self.name == "leaky_relu":
            return f"leaky_relu({self.alpha:g})"
        return self.name


IDENTITY = PresetKind("identity")
STEP = PresetKind("step")
SIGMOID = PresetKind("sigmoid")
TANH = PresetKind("tanh")
RELU = PresetKind("relu")
SOFTPLUS = PresetKind("softplus")
GAUSSIAN = PresetKind("gaussian")


def leaky_relu(alpha: float = 0.1) -> PresetKind:
    """LeakyReLU preset kind with slope alpha in (0, 0.1]."""
    return PresetKind("leaky_relu", alpha)


def preset(kind: PresetKind) -> UafParams:
    """Parameter assignment that makes the UAF match the given activation.

    identity and softplus are exact; the rest are fixed best-approximation
    constants (step/relu use the large finite slope A = 70.9992).
    """
    name = kind.name
    if name == "identity":
        return UafParams(1.0, 0.0, 0.0, -1.0, 0.0)
    if name == "step":
        return UafParams(A_STEP, 1.0 / (2.0 * A_STEP), 0.0, A_STEP, 0.0)
    if name == "sigmoid":
        return UafParams(A_SIGMOID, 1.0 / (2.0 * A_SIGMOID), 0.0, A_SIGMOID, 0.0)
    if name == "tanh":
        return UafParams(A_TANH, 1.0 / A_TANH, 0.0, A_TANH, -1.0)
    if name == "relu":
        return UafParams(A_RELU, 0.0, 0.0, A_RELU - 1.0, 0.0)
    if name == "leaky_relu":
        return UafParams(1.0, 0.0, 0.0, -kind.alpha, 0.0)
    if name == "softplus":
        return UafParams(1.0, 0.0, 0.0, 0.0, LN2)
    if name == "gaussian":
        return UafParams(0.0, 0.0, C_GAUSSIAN, 0.0, LN2)
    raise ValueError(f"unknown preset kind {name!r}")


def _exponents(p: UafParams, x: float) -> tuple[float, float]:
    return (p.A * (x + p.B) + p.C * x * x, p.D * (x - p.B))


def eval_naive(p: UafParams, x: float, *, on_overflow: str = "error") -> float:
    """Literal evaluation ln(1+e^{z1}) - ln(1+e^{z2}) + E; the reference oracle.

    When an exponent argument exceeds the float64 exp range, raises
    UafOverflowError (default) or returns the signed infinity the literal
    formula would produce (on_overflow="inf").
    """
    if on_overflow not in ("error", "inf"):
        raise ValueError(f"on_overflow must be 'error' or 'inf', got {on_overflow!r}")
    x = _require_finite("x", x)
    z1, z2 = _exponents(p, x)
    if z1 > _EXP_MAX or z2 > _EXP_MAX:
        if on_overflow == "error":
            arm = "A(x+B)+Cx^2" if z1 > _EXP_MAX else "D(x-B)"
            raise UafOverflowError(
                f"exponent argument {arm} = {max(z1, z2):.6g} exceeds the "
                f"float64 exp range ({_EXP_MAX:.6g}); use eval_stable"
            )
        return math.inf if z1 > _EXP_MAX else -math.inf
    return math.log(1.0 + math.exp(z1)) - math.log(1.0 + math.exp(z2)) + p.E


def eval_stable(p: UafParams, x: float) -> float:
    """Overflow-safe evaluation via softplus(z) = max(z,0) + log1p(e^{-|z|}).

    Agrees with eval_naive wherever the naive form is representable and stays
    finite for all finite inputs.
    """
    x = _require_finite("x", x)
    return float(_k_eval(np.array([x]), *p.as_tuple())[0])


def grad(p: UafParams, x: float) -> UafGradient:
    """Analytic first derivatives of f at x (d_x and the parameter partials)."""
    x = _require_finite("x", x)
    row = _k_grad(np.array([x]), *p.as_tuple())[0]
    return UafGradient(*(float(v) for v in row))


def eval_batch(p: UafParams, xs) -> np.ndarray:
    """Elementwise eval_stable over a sequence; returns a float64 array."""
    arr = np.ascontiguousarray(xs, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"xs must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("xs must contain only finite values")
    return _k_eval(arr, *p.as_tuple())


def grad_batch(p: UafParams, xs) -> np.ndarray:
    """Elementwise grad over a sequence; returns an (n, 6) float64 array
    with columns (d_x, d_A, d_B, d_C, d_D, d_E)."""
    arr = np.ascontiguousarray(xs, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"xs must be one-dimensional, got shape {arr.shape}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise ValueError("xs must contain only finite values")
    return _k_grad(arr, *p.as_tuple())
