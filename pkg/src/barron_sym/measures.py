"""Finitely supported parameter measures and the targets they represent.

A discrete measure over neuron parameters (a, w, b) plays two roles: it
defines a target function f(x) = sum_j p_j a_j sigma(w_j . x + b_j), and
it is the sampling distribution for the Monte-Carlo network construction.
Group symmetrization replaces each atom by its weight-space orbit
(p/|G|, a, g^T w, b), which makes the represented function invariant
under the original action on inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .activations import Activation
from .groups import GroupAction
from .networks import NetParams

MASS_TOL = 1e-12


class EmptyMeasureError(ValueError):
    """Raised when an operation needs at least one atom."""


@dataclass(frozen=True)
class DiscreteMeasure:
    """Probability measure with finitely many atoms on (a, w, b) triples.

    weights: (J,) nonnegative, summing to 1
    a: (J,) outer amplitudes
    w: (J, d) inner weights
    b: (J,) biases
    """

    weights: np.ndarray
    a: np.ndarray
    w: np.ndarray
    b: np.ndarray
    name: str = ""

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        a = np.asarray(self.a, dtype=np.float64)
        w = np.atleast_2d(np.asarray(self.w, dtype=np.float64))
        b = np.asarray(self.b, dtype=np.float64)
        if w.shape[0] != len(weights) or len(a) != len(weights) \
                or len(b) != len(weights):
            raise ValueError("atom arrays must share the same length")
        if len(weights) == 0:
            raise EmptyMeasureError("measure needs at least one atom")
        if np.any(weights < 0):
            raise ValueError("atom weights must be nonnegative")
        if abs(weights.sum() - 1.0) > MASS_TOL:
            raise ValueError(
                f"atom weights must sum to 1, got {weights.sum()!r}")
        for arr in (weights, a, w, b):
            arr.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "b", b)

    @property
    def dim(self) -> int:
        return self.w.shape[1]

    @property
    def n_atoms(self) -> int:
        return len(self.weights)

    @classmethod
    def from_atoms(cls, atoms, name: str = "") -> "DiscreteMeasure":
        """Build from dicts {"p":, "a":, "w": [..], "b":} (the JSON form)."""
        if not atoms:
            raise EmptyMeasureError("measure needs at least one atom")
        return cls(
            weights=np.array([at["p"] for at in atoms]),
            a=np.array([at["a"] for at in atoms]),
            w=np.array([np.atleast_1d(at["w"]) for at in atoms]),
            b=np.array([at["b"] for at in atoms]),
            name=name,
        )

    def to_atoms(self):
        return [
            {"p": float(p), "a": float(a), "w": [float(v) for v in w],
             "b": float(b)}
            for p, a, w, b in zip(self.weights, self.a, self.w, self.b)
        ]


def barron_norm_bound(measure: DiscreteMeasure) -> float:
    """sqrt(sum_j p_j |a_j|^2 (||w_j||_1 + |b_j| + 1)^2).

    An upper bound on the Barron norm of the represented function: the
    norm itself is an infimum over all representations, this evaluates
    the given one.
    """
    if measure.n_atoms == 0:
        raise EmptyMeasureError("measure has no atoms")
    t = np.abs(measure.w).sum(axis=1) + np.abs(measure.b) + 1.0
    return float(np.sqrt(np.dot(measure.weights, (measure.a * t) ** 2)))


def target_eval(measure: DiscreteMeasure, act: Activation,
                x: np.ndarray) -> np.ndarray:
    """f(x) = sum_j p_j a_j sigma(w_j . x + b_j); x is (d,) or (N, d)."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[1] != measure.dim:
        raise ValueError(
            f"point dimension {pts.shape[1]} != measure dimension {measure.dim}")
    z = pts @ measure.w.T + measure.b  # (N, J)
    vals = act(z) @ (measure.weights * measure.a)
    return float(vals[0]) if single else vals


def symmetrize(measure: DiscreteMeasure, group: GroupAction) -> DiscreteMeasure:
    """Spread each atom over its weight-space orbit.

    Atom (p, a, w, b) becomes |G| atoms (p/|G|, a, g^T w, b).  The
    represented function is then invariant under the group acting on
    inputs.  Total mass is preserved; for permutation and sign-flip
    groups the Barron-norm bound is preserved too since ||g^T w||_1 =
    ||w||_1 for such g.
    """
    if group.dim != measure.dim:
        raise ValueError(
            f"group dimension {group.dim} != measure dimension {measure.dim}")
    n = group.order
    mats = group.stacked()  # (S, d, d)
    # g^T w for every atom and element: (S, J, d) -> interleave atom-major
    w_orbit = np.einsum("sij,kj->ksi", np.transpose(mats, (0, 2, 1)), measure.w)
    J = measure.n_atoms
    return DiscreteMeasure(
        weights=np.repeat(measure.weights / n, n),
        a=np.repeat(measure.a, n),
        w=w_orbit.reshape(J * n, measure.dim),
        b=np.repeat(measure.b, n),
        name=f"{measure.name}|{group.name}" if measure.name else measure.name,
    )


def sample_atoms(measure: DiscreteMeasure, m: int, seed) -> NetParams:
    """m i.i.d. categorical draws of atoms, copied into width-m parameters.

    Deterministic given the seed; the seed may be an int or a sequence of
    ints (derived streams).
    """
    if m < 1:
        raise ValueError(f"width must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    idx = rng.choice(measure.n_atoms, size=m, p=measure.weights)
    return NetParams(a=measure.a[idx].copy(), w=measure.w[idx].copy(),
                     b=measure.b[idx].copy())


@dataclass(frozen=True)
class TargetFunction:
    """A measure-activation pair with its cached norm bound.

    invariant_under names the group the target is expected to be
    invariant under (None for unconstrained targets); the check itself
    is check_invariance, kept separate because it costs random probes.
    """

    measure: DiscreteMeasure
    activation: Activation
    barron_bound: float = field(default=None)
    invariant_under: str | None = None

    def __post_init__(self):
        if self.barron_bound is None:
            object.__setattr__(self, "barron_bound",
                               barron_norm_bound(self.measure))

    @property
    def dim(self) -> int:
        return self.measure.dim

    def __call__(self, x):
        return target_eval(self.measure, self.activation, x)


def check_invariance(f: TargetFunction, group: GroupAction,
                     n_probes: int = 1000, seed: int = 0) -> float:
    """Max |f(gx) - f(x)| over random probes in [-1, 1]^d and all g."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(-1.0, 1.0, size=(n_probes, f.dim))
    base = f(xs)
    worst = 0.0
    for s in range(group.order):
        gx = xs @ group.elements[s].T
        worst = max(worst, float(np.max(np.abs(f(gx) - base))))
    return worst
