"""Finite linear group actions stored as explicit matrix sets.

A group is represented by the dense d x d matrices of its action on the
input space, identity first and element order deterministic, so that
downstream CSV outputs are reproducible.  All tolerance checks use
ATOL = 1e-12: constructor matrices have entries in {0, +-1, cos, sin}
with a single rounding each.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

ATOL = 1e-12


class GroupSpecError(ValueError):
    """Raised for invalid group constructor arguments or spec strings."""


@dataclass(frozen=True)
class GroupAction:
    """A finite set of invertible matrices closed under composition.

    elements[0] is always the identity.  Matrices are immutable after
    construction; instances are safe to share across workers.
    """

    dim: int
    elements: tuple = field(repr=False)
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise GroupSpecError(f"dimension must be positive, got {self.dim}")
        mats = tuple(np.asarray(m, dtype=np.float64) for m in self.elements)
        for m in mats:
            if m.shape != (self.dim, self.dim):
                raise GroupSpecError(
                    f"element shape {m.shape} does not match dim {self.dim}")
            m.setflags(write=False)
        object.__setattr__(self, "elements", mats)
        if not np.allclose(mats[0], np.eye(self.dim), atol=ATOL, rtol=0.0):
            raise GroupSpecError("elements[0] must be the identity matrix")
        seen = {}
        for i, m in enumerate(mats):
            key = np.round(m, 9).tobytes()
            if key in seen:
                raise GroupSpecError(
                    f"elements {seen[key]} and {i} coincide; group elements "
                    "must be distinct")
            seen[key] = i

    def __len__(self):
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def apply(self, index: int, x: np.ndarray) -> np.ndarray:
        """Image of x under element `index`."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dim:
            raise ValueError(
                f"point dimension {x.shape[-1]} != group dimension {self.dim}")
        return x @ self.elements[index].T

    def transposed(self, index: int, w: np.ndarray) -> np.ndarray:
        """Image of a weight vector under the transposed action g^T w.

        Used to push the group action from inputs onto first-layer weights:
        sigma(w . gx + b) = sigma((g^T w) . x + b).
        """
        w = np.asarray(w, dtype=np.float64)
        if w.shape[-1] != self.dim:
            raise ValueError(
                f"weight dimension {w.shape[-1]} != group dimension {self.dim}")
        return w @ self.elements[index]

    def stacked(self) -> np.ndarray:
        """All elements as one (|G|, d, d) array."""
        return np.stack(self.elements)


@dataclass(frozen=True)
class GroupCheckReport:
    closure_ok: bool
    identity_ok: bool
    inverses_ok: bool
    max_deviation: float

    @property
    def ok(self) -> bool:
        return self.closure_ok and self.identity_ok and self.inverses_ok


def make_trivial(d: int) -> GroupAction:
    """The one-element group {I_d}."""
    if d < 1:
        raise GroupSpecError(f"dimension must be positive, got {d}")
    return GroupAction(dim=d, elements=(np.eye(d),), name=f"trivial:{d}")


def make_reflection(d: int) -> GroupAction:
    """The order-2 group {I, -I} acting by point reflection x -> -x."""
    if d < 1:
        raise GroupSpecError(f"dimension must be positive, got {d}")
    return GroupAction(dim=d, elements=(np.eye(d), -np.eye(d)),
                       name=f"reflection:{d}")


def make_cyclic_2d(n: int) -> GroupAction:
    """The planar rotation group C_n = {R_{2 pi k / n} : k = 0..n-1}."""
    if n < 1:
        raise GroupSpecError(f"cyclic group order must be >= 1, got {n}")
    mats = []
    for k in range(n):
        t = 2.0 * math.pi * k / n
        mats.append(np.array([[math.cos(t), -math.sin(t)],
                              [math.sin(t), math.cos(t)]]))
    return GroupAction(dim=2, elements=tuple(mats), name=f"cyclic2d:{n}")


def make_symmetric(d: int) -> GroupAction:
    """All d! permutation matrices, in lexicographic permutation order."""
    if d < 1:
        raise GroupSpecError(f"dimension must be positive, got {d}")
    if d > 7:
        raise GroupSpecError(
            f"symmetric group capped at d = 7 ({math.factorial(7)} elements); "
            f"got d = {d}")
    mats = []
    for perm in itertools.permutations(range(d)):
        m = np.zeros((d, d))
        # row i of the matrix selects coordinate perm[i]: (Px)_i = x_perm[i]
        for i, j in enumerate(perm):
            m[i, j] = 1.0
        mats.append(m)
    return GroupAction(dim=d, elements=tuple(mats), name=f"symmetric:{d}")


def verify_group(group: GroupAction) -> GroupCheckReport:
    """Check the group axioms numerically; reports, never raises.

    Closure and inverse lookups hash matrices rounded to 1e-9 and then
    confirm the match entrywise, so the reported deviation is the worst
    entry error over all products against their nearest catalog element.
    """
    mats = group.stacked()
    n = len(mats)
    index = {np.round(m, 9).tobytes(): i for i, m in enumerate(mats)}

    def lookup(product):
        i = index.get(np.round(product, 9).tobytes())
        if i is not None:
            return i, float(np.max(np.abs(product - mats[i])))
        devs = np.max(np.abs(mats - product[None]), axis=(1, 2))
        j = int(np.argmin(devs))
        return j, float(devs[j])

    identity_dev = float(np.max(np.abs(mats[0] - np.eye(group.dim))))
    identity_ok = identity_dev <= ATOL

    max_dev = identity_dev
    closure_ok = True
    inverse_found = [False] * n
    for i in range(n):
        for j in range(n):
            k, dev = lookup(mats[i] @ mats[j])
            max_dev = max(max_dev, dev)
            if dev > ATOL:
                closure_ok = False
            elif k == 0:
                inverse_found[i] = True
    inverses_ok = all(inverse_found)

    return GroupCheckReport(closure_ok=closure_ok, identity_ok=identity_ok,
                            inverses_ok=inverses_ok, max_deviation=max_dev)


def orbit(group: GroupAction, x: np.ndarray) -> np.ndarray:
    """All images of x, ordered like the element list: row s is elements[s] x."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (group.dim,):
        raise ValueError(
            f"point shape {x.shape} incompatible with group dimension {group.dim}")
    return group.stacked() @ x


def parse_group_spec(spec: str) -> GroupAction:
    """Build a group from a config string.

    Accepted forms: "reflection:d", "cyclic2d:n", "symmetric:d", "trivial:d".
    """
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise GroupSpecError(f"group spec {spec!r} must look like 'kind:n'")
    try:
        n = int(arg)
    except ValueError:
        raise GroupSpecError(f"group spec {spec!r} has non-integer size {arg!r}")
    builders = {
        "reflection": make_reflection,
        "cyclic2d": make_cyclic_2d,
        "symmetric": make_symmetric,
        "trivial": make_trivial,
    }
    if kind not in builders:
        raise GroupSpecError(
            f"unknown group kind {kind!r}; expected one of {sorted(builders)}")
    return builders[kind](n)
