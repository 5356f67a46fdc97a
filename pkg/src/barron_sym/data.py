"""Domain samplers and dataset synthesis under bounded observation noise.

Domains are always inside the unit sup-norm ball.  Noise is uniform on
(-tau, tau): bounded, conditionally centered, with analytic second
moment tau^2 / 3, which is everything the observation model requires.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .measures import TargetFunction

DOMAIN_KINDS = ("cube_pm1", "unit_cube", "unit_disk")


@dataclass(frozen=True)
class DomainSpec:
    """kind in {cube_pm1, unit_cube, unit_disk}; unit_disk is planar."""

    kind: str
    d: int

    def __post_init__(self):
        if self.kind not in DOMAIN_KINDS:
            raise ValueError(
                f"unknown domain kind {self.kind!r}; expected {DOMAIN_KINDS}")
        if self.kind == "unit_disk" and self.d != 2:
            raise ValueError("unit_disk is only defined for d = 2")
        if self.d < 1:
            raise ValueError(f"dimension must be positive, got {self.d}")


def sample_domain(spec: DomainSpec, n: int, seed) -> np.ndarray:
    """n i.i.d. uniform points on the domain, deterministic per seed.

    The disk uses rejection from the enclosing square: exact uniformity
    with no Jacobian bookkeeping.
    """
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    if spec.kind == "cube_pm1":
        return rng.uniform(-1.0, 1.0, size=(n, spec.d))
    if spec.kind == "unit_cube":
        return rng.uniform(0.0, 1.0, size=(n, spec.d))
    # Fixed-size candidate blocks keep the accepted stream independent of
    # n, so a longer draw from the same seed extends a shorter one.
    out = np.empty((n, 2))
    have = 0
    while have < n:
        cand = rng.uniform(-1.0, 1.0, size=(512, 2))
        keep = cand[(cand ** 2).sum(axis=1) <= 1.0]
        take = min(len(keep), n - have)
        out[have:have + take] = keep[:take]
        have += take
    return out


@dataclass(frozen=True)
class Dataset:
    """Observations (x_i, y_i) with the noise model that produced them."""

    xs: np.ndarray
    ys: np.ndarray
    noise_kind: str  # "none" or "uniform"
    tau: float
    tau0: float

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=np.float64))
        ys = np.asarray(self.ys, dtype=np.float64)
        if len(xs) != len(ys):
            raise ValueError("xs and ys must have the same length")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def M(self) -> int:
        return len(self.ys)

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def to_json(self) -> str:
        noise = {"kind": self.noise_kind}
        if self.noise_kind != "none":
            noise["tau"] = self.tau
        return json.dumps({
            "d": self.dim, "M": self.M,
            "xs": self.xs.tolist(), "ys": self.ys.tolist(),
            "noise": noise, "tau0": self.tau0,
        })

    @classmethod
    def from_json(cls, text: str) -> "Dataset":
        obj = json.loads(text)
        noise = obj["noise"]
        return cls(xs=np.array(obj["xs"]), ys=np.array(obj["ys"]),
                   noise_kind=noise["kind"], tau=noise.get("tau", 0.0),
                   tau0=obj["tau0"])


def make_dataset(target: TargetFunction, spec: DomainSpec, M: int,
                 noise_tau: float | None, seed) -> Dataset:
    """Draw y_i = f(x_i) + eps_i with eps uniform on (-tau, tau).

    noise_tau None or 0 gives noiseless observations.  tau0 is recorded
    as the analytic second moment tau^2 / 3.
    """
    if M < 1:
        raise ValueError(f"dataset size must be >= 1, got {M}")
    rng = np.random.default_rng(seed)
    xs = sample_domain(spec, M, rng)
    ys = target(xs)
    if noise_tau:
        ys = ys + rng.uniform(-noise_tau, noise_tau, size=M)
        return Dataset(xs=xs, ys=ys, noise_kind="uniform", tau=noise_tau,
                       tau0=noise_tau ** 2 / 3.0)
    return Dataset(xs=xs, ys=ys, noise_kind="none", tau=0.0, tau0=0.0)
