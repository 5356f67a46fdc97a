"""Activation function zoo with analytic derivatives and theory constants.

Each activation carries the constants that drive the error bounds: the
Lipschitz constant, the value at zero, and the weighted-coefficient
constant gamma of its ReLU representation.  Piecewise-linear kinds have
exact gamma from an explicit ReLU representation; smooth kinds get gamma
populated from the curvature integral

    gamma0 = integral |sigma''(x)| (|x| + 1) dx

via composite Simpson quadrature (estimate_gamma0).

Derivatives at kinks follow the right-derivative convention, e.g.
relu'(0) = 1: any fixed subgradient choice is valid for subgradient
descent and this matches common practice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erf

SQRT2PI = math.sqrt(2.0 * math.pi)


class ActivationSpecError(ValueError):
    """Raised for malformed activation spec strings or parameters."""


class MissingConstantError(RuntimeError):
    """gamma requested for a smooth kind before estimate_gamma0 populated it."""


class NotApplicableError(RuntimeError):
    """Curvature quadrature requested for a piecewise-linear kind."""


def _check_finite(x):
    arr = np.asarray(x, dtype=np.float64)
    if np.any(np.isnan(arr)):
        raise ValueError("activation input contains NaN")
    return arr


@dataclass(frozen=True)
class Activation:
    """Immutable activation descriptor; evaluation is pure and vectorized."""

    kind: str
    param: float | None
    lipschitz: float
    value_at_zero: float
    gamma: float | None
    piecewise_linear: bool
    kinks: tuple = ()

    @property
    def spec(self) -> str:
        if self.param is None:
            return self.kind
        return f"{self.kind}:{self.param:g}"

    def __call__(self, x):
        return _EVAL[self.kind](_check_finite(x), self.param)

    def deriv(self, x):
        return _DERIV[self.kind](_check_finite(x), self.param)

    def second_deriv(self, x):
        if self.piecewise_linear:
            raise NotApplicableError(
                f"{self.kind} is piecewise linear; second derivative is a "
                "sum of point masses, not a function")
        return _DERIV2[self.kind](_check_finite(x), self.param)

    def constants(self):
        """(L_sigma, sigma(0), gamma) as used by the approximation and
        complexity bounds."""
        if self.gamma is None:
            raise MissingConstantError(
                f"gamma for {self.kind} has not been populated; run "
                "estimate_gamma0 (or ensure_gamma) first")
        return self.lipschitz, self.value_at_zero, self.gamma

    def with_gamma(self, gamma: float) -> "Activation":
        return replace(self, gamma=float(gamma))


# ---------------------------------------------------------------------------
# evaluators, derivatives, second derivatives
# ---------------------------------------------------------------------------

def _sigmoid(x):
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _softplus(x):
    return np.logaddexp(0.0, x)


def _norm_pdf(x):
    return np.exp(-0.5 * x * x) / SQRT2PI


def _norm_cdf(x):
    return 0.5 * (1.0 + erf(x / math.sqrt(2.0)))


def _bump_raw(u):
    inside = np.abs(u) <= 1.0
    out = np.zeros_like(u)
    v = u[inside]
    out[inside] = (1.0 - v * v) ** 3
    return out


_EVAL = {
    "relu": lambda x, p: np.maximum(x, 0.0),
    "leaky_relu": lambda x, p: np.where(x >= 0, x, p * x),
    "hard_sigmoid": lambda x, p: np.clip((x + 1.0) / 2.0, 0.0, 1.0),
    "hard_tanh": lambda x, p: np.clip(x, -1.0, 1.0),
    "sigmoid": lambda x, p: _sigmoid(x),
    "tanh": lambda x, p: np.tanh(x),
    "softplus": lambda x, p: _softplus(x),
    "silu": lambda x, p: x * _sigmoid(x),
    "gelu": lambda x, p: x * _norm_cdf(x),
    "bump": lambda x, p: _bump_raw(x / p),
}

_DERIV = {
    # right-derivative at kinks: relu'(0) = 1, hard kinds take the
    # incoming-from-the-right slope
    "relu": lambda x, p: np.where(x >= 0, 1.0, 0.0),
    "leaky_relu": lambda x, p: np.where(x >= 0, 1.0, p),
    "hard_sigmoid": lambda x, p: np.where((x >= -1.0) & (x < 1.0), 0.5, 0.0),
    "hard_tanh": lambda x, p: np.where((x >= -1.0) & (x < 1.0), 1.0, 0.0),
    "sigmoid": lambda x, p: _sigmoid(x) * (1.0 - _sigmoid(x)),
    "tanh": lambda x, p: 1.0 - np.tanh(x) ** 2,
    "softplus": lambda x, p: _sigmoid(x),
    "silu": lambda x, p: _sigmoid(x) * (1.0 + x * (1.0 - _sigmoid(x))),
    "gelu": lambda x, p: _norm_cdf(x) + x * _norm_pdf(x),
    "bump": lambda x, p: _bump_deriv(x, p),
}


def _bump_deriv(x, h):
    u = x / h
    inside = np.abs(u) <= 1.0
    out = np.zeros_like(u)
    v = u[inside]
    out[inside] = -6.0 * v * (1.0 - v * v) ** 2 / h
    return out


def _sigmoid_d2(x, p):
    s = _sigmoid(x)
    return s * (1.0 - s) * (1.0 - 2.0 * s)


def _tanh_d2(x, p):
    t = np.tanh(x)
    return -2.0 * t * (1.0 - t * t)


def _softplus_d2(x, p):
    s = _sigmoid(x)
    return s * (1.0 - s)


def _silu_d2(x, p):
    s = _sigmoid(x)
    ds = s * (1.0 - s)
    # f = x s; f'' = 2 s' + x s'' with s'' = s'(1 - 2s)
    return 2.0 * ds + x * ds * (1.0 - 2.0 * s)


def _gelu_d2(x, p):
    # f = x Phi(x); f'' = 2 phi(x) + x phi'(x) = (2 - x^2) phi(x)
    return (2.0 - x * x) * _norm_pdf(x)


def _bump_d2(x, h):
    u = x / h
    inside = np.abs(u) <= 1.0
    out = np.zeros_like(u)
    v = u[inside]
    out[inside] = 6.0 * (1.0 - v * v) * (5.0 * v * v - 1.0) / (h * h)
    return out


_DERIV2 = {
    "sigmoid": _sigmoid_d2,
    "tanh": _tanh_d2,
    "softplus": _softplus_d2,
    "silu": _silu_d2,
    "gelu": _gelu_d2,
    "bump": _bump_d2,
}

# Lipschitz constants are exact where closed-form (relu family, sigmoid 1/4,
# tanh/softplus 1); for silu and gelu they are the numerical suprema of
# |sigma'| rounded up in the last printed digit.
_SILU_LIPSCHITZ = 1.0998394
_GELU_LIPSCHITZ = 1.1289042

# gamma for piecewise-linear kinds comes from explicit ReLU representations:
#   relu(x) itself                                   -> 1
#   leaky(x)    = relu(x) - lam relu(-x)             -> 1 + lam
#   hard_sigmoid(x) = (relu(x+1) - relu(x-1)) / 2    -> 2
#   hard_tanh(x)    = relu(x+1) - relu(x-1) - 1      -> 4 (ReLU terms)
MONOTONE_KINDS = ("relu", "leaky_relu", "hard_sigmoid", "hard_tanh",
                  "sigmoid", "tanh", "softplus")
SMOOTH_KINDS = ("sigmoid", "tanh", "softplus", "silu", "gelu", "bump")
ALL_KINDS = ("relu", "leaky_relu", "hard_sigmoid", "hard_tanh", "sigmoid",
             "tanh", "softplus", "silu", "gelu", "bump")


def make_activation(spec: str) -> Activation:
    """Build an activation from a config string.

    Accepted: "relu", "leaky_relu:0.1", "hard_sigmoid", "hard_tanh",
    "sigmoid", "tanh", "softplus", "silu", "gelu", "bump:0.25".
    """
    kind, sep, arg = spec.partition(":")
    param = None
    if sep:
        try:
            param = float(arg)
        except ValueError:
            raise ActivationSpecError(
                f"activation spec {spec!r} has non-numeric parameter {arg!r}")

    if kind == "relu":
        return Activation("relu", None, 1.0, 0.0, 1.0, True, kinks=(0.0,))
    if kind == "leaky_relu":
        if param is None or not 0.0 < param < 1.0:
            raise ActivationSpecError(
                f"leaky_relu needs a slope in (0, 1), got {param}")
        return Activation("leaky_relu", param, 1.0, 0.0, 1.0 + param, True,
                          kinks=(0.0,))
    if kind == "hard_sigmoid":
        return Activation("hard_sigmoid", None, 0.5, 0.5, 2.0, True,
                          kinks=(-1.0, 1.0))
    if kind == "hard_tanh":
        return Activation("hard_tanh", None, 1.0, 0.0, 4.0, True,
                          kinks=(-1.0, 1.0))
    if kind == "sigmoid":
        return Activation("sigmoid", None, 0.25, 0.5, None, False)
    if kind == "tanh":
        return Activation("tanh", None, 1.0, 0.0, None, False)
    if kind == "softplus":
        return Activation("softplus", None, 1.0, math.log(2.0), None, False)
    if kind == "silu":
        return Activation("silu", None, _SILU_LIPSCHITZ, 0.0, None, False)
    if kind == "gelu":
        return Activation("gelu", None, _GELU_LIPSCHITZ, 0.0, None, False)
    if kind == "bump":
        if param is None or param <= 0.0:
            raise ActivationSpecError(
                f"bump needs a positive half-width, got {param}")
        lip = 96.0 * math.sqrt(5.0) / 125.0 / param
        return Activation("bump", param, lip, 1.0, None, False)
    raise ActivationSpecError(
        f"unknown activation kind {kind!r}; expected one of {ALL_KINDS}")


def estimate_gamma0(act: Activation, half_width: float = 40.0,
                    n_points: int = 200_001) -> float:
    """Composite-Simpson estimate of integral |sigma''(x)|(|x|+1) dx.

    The integrand decays exponentially for the smooth kinds and is
    compactly supported for bump, so a window [-half_width, half_width]
    with half_width >= 20 captures the tail below 1e-6.
    """
    if act.piecewise_linear:
        raise NotApplicableError(
            f"{act.kind} is piecewise linear; gamma is exact, the curvature "
            "integral does not apply")
    if half_width < 20.0:
        raise ValueError(f"half_width must be >= 20, got {half_width}")
    if n_points < 10_000:
        raise ValueError(f"n_points must be >= 1e4, got {n_points}")
    n = int(n_points)
    if n % 2 == 0:
        n += 1  # Simpson needs an even interval count
    xs = np.linspace(-half_width, half_width, n)
    ys = np.abs(act.second_deriv(xs)) * (np.abs(xs) + 1.0)
    h = xs[1] - xs[0]
    weights = np.ones(n)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(h / 3.0 * np.dot(weights, ys))


def ensure_gamma(act: Activation) -> Activation:
    """Return act with gamma populated (quadrature for smooth kinds)."""
    if act.gamma is not None:
        return act
    return act.with_gamma(estimate_gamma0(act))
