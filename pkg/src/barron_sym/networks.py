"""Width-m two-layer networks, group-averaged evaluation, and gradients.

The plain network is f(x) = (1/m) sum_i a_i sigma(w_i . x + b_i); the
group-averaged variant additionally averages the argument over the orbit
of x.  Both run through one kernel over a stack of orbit points, so the
trivial group reproduces the plain forward bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .activations import Activation
from .groups import GroupAction


@dataclass(frozen=True)
class NetParams:
    """Parameters Theta = (a, w, b): a (m,), w (m, d), b (m,)."""

    a: np.ndarray
    w: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        w = np.atleast_2d(np.asarray(self.w, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64)
        if not (len(a) == w.shape[0] == len(b)):
            raise ValueError(
                f"inconsistent widths: a has {len(a)}, w has {w.shape[0]}, "
                f"b has {len(b)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @property
    def m(self) -> int:
        return len(self.a)

    @property
    def dim(self) -> int:
        return self.w.shape[1]

    def to_json(self) -> str:
        return json.dumps({"m": self.m, "a": self.a.tolist(),
                           "w": self.w.tolist(), "b": self.b.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "NetParams":
        obj = json.loads(text)
        return cls(a=np.array(obj["a"]), w=np.array(obj["w"]),
                   b=np.array(obj["b"]))


def path_norm(params: NetParams) -> float:
    """sqrt((1/m) sum_i (|a_i| (||w_i||_1 + |b_i| + 1))^2)."""
    t = np.abs(params.w).sum(axis=1) + np.abs(params.b) + 1.0
    return float(np.sqrt(np.mean((params.a * t) ** 2)))


def _orbit_stack(group: GroupAction | None, x: np.ndarray) -> np.ndarray:
    """Points x (N, d) mapped through every group element: (S, N, d)."""
    if group is None or group.order == 1:
        return x[None]
    return np.einsum("sij,nj->sni", group.stacked(), x)


def _features(params: NetParams, act: Activation, orbit_pts: np.ndarray):
    """Orbit-averaged activations: (N, m) from orbit points (S, N, d)."""
    z = np.einsum("snd,md->snm", orbit_pts, params.w) + params.b
    return act(z).mean(axis=0), z


def forward(params: NetParams, act: Activation, x) -> float | np.ndarray:
    """(1/m) sum_i a_i sigma(w_i . x + b_i); x is (d,) or (N, d)."""
    return forward_invariant(params, act, None, x)


def forward_invariant(params: NetParams, act: Activation,
                      group: GroupAction | None, x) -> float | np.ndarray:
    """Group-averaged forward (1/(m|G|)) sum_i a_i sum_g sigma(w_i . gx + b_i).

    Passing None or the trivial group gives the plain network on the
    identical arithmetic path.
    """
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != params.dim:
        raise ValueError(
            f"point dimension {pts.shape[1]} != network dimension {params.dim}")
    if group is not None and group.dim != params.dim:
        raise ValueError(
            f"group dimension {group.dim} != network dimension {params.dim}")
    phi, _ = _features(params, act, _orbit_stack(group, pts))
    out = phi @ params.a / params.m
    return float(out[0]) if single else out


def grad_objective(params: NetParams, act: Activation,
                   group: GroupAction | None, xs: np.ndarray, ys: np.ndarray,
                   lam: float) -> NetParams:
    """Analytic gradient of the regularized empirical risk

        J(Theta) = (1/M) sum_i (f^G(x_i) - y_i)^2
                   + lam (path_norm^2 + 1).

    The |.| terms in the regularizer use sign subgradients with
    sign(0) = 0, which keeps exactly-zero weights stationary.
    Returns a NetParams holding (dJ/da, dJ/dw, dJ/db).
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) == 0:
        raise ValueError("empty batch")
    if lam < 0:
        raise ValueError(f"regularization strength must be >= 0, got {lam}")
    M = len(xs)
    m = params.m
    orbit_pts = _orbit_stack(group, xs)  # (S, M, d)
    n_orbit = orbit_pts.shape[0]

    phi, z = _features(params, act, orbit_pts)  # phi (M, m), z (S, M, m)
    resid = phi @ params.a / m - ys  # (M,)

    scale = 2.0 / (M * m)
    ga = scale * (phi.T @ resid)
    dz = act.deriv(z)  # (S, M, m)
    # sum over orbit copies and batch of resid * sigma'(z) * orbit point
    gw = np.einsum("snm,n,snd->md", dz, resid, orbit_pts) \
        * (scale / n_orbit) * params.a[:, None]
    gb = np.einsum("snm,n->m", dz, resid) * (scale / n_orbit) * params.a

    if lam > 0.0:
        t = np.abs(params.w).sum(axis=1) + np.abs(params.b) + 1.0
        ga += lam * 2.0 / m * params.a * t * t
        at = lam * 2.0 / m * params.a ** 2 * t
        gw += at[:, None] * np.sign(params.w)
        gb += at * np.sign(params.b)

    return NetParams(a=ga, w=gw, b=gb)


def objective(params: NetParams, act: Activation,
              group: GroupAction | None, xs: np.ndarray, ys: np.ndarray,
              lam: float) -> float:
    """The regularized empirical risk J itself (used by the trainer and
    the finite-difference gradient tests)."""
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.asarray(ys, dtype=np.float64)
    if len(xs) == 0:
        raise ValueError("empty batch")
    pred = forward_invariant(params, act, group, xs)
    loss = float(np.mean((pred - ys) ** 2))
    if lam > 0.0:
        loss += lam * (path_norm(params) ** 2 + 1.0)
    return loss
