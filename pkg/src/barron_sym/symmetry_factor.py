"""Estimation of the symmetry factor delta = min{1, delta*}.

delta* is the worst case, over the configured measures and over the
domain, of the ratio

    E_rho[(a . avg_g sigma(w . gx + b))^2] / E_rho[(a sigma(w . x + b))^2],

i.e. how much group averaging shrinks the second moment of a single
neuron.  Small delta means the orbit copies of a neuron barely overlap
and symmetrization buys a proportional approximation gain; delta near 1
means the copies coincide and nothing is gained.

The sup over the domain is approximated by uniform Monte-Carlo probes
plus deterministic boundary probes (cube corners, a power-of-two angular
grid on the disk boundary): the extremal ratios of the hand-computable
scenarios sit at corners and boundaries, so boundary probes are
mandatory for tight estimates.  Probes with denominator below
DENOM_FLOOR are skipped and counted, never divided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .activations import Activation
from .data import DomainSpec, sample_domain
from .groups import GroupAction
from .measures import DiscreteMeasure

DENOM_FLOOR = 1e-14


class DegenerateMeasureError(RuntimeError):
    """Every probe had a vanishing denominator."""


@dataclass(frozen=True)
class DeltaEstimate:
    delta: float
    delta_star: float
    argmax_x: np.ndarray
    argmax_measure: str
    n_probes: int
    skipped_probes: int


def _moment_ratios(measure: DiscreteMeasure, act: Activation,
                   group: GroupAction, xs: np.ndarray) -> np.ndarray:
    """Ratio at each probe row; NaN where the denominator is below floor."""
    pa2 = measure.weights * measure.a ** 2
    orbit_pts = np.einsum("sij,nj->sni", group.stacked(), xs)  # (S, N, d)
    z = np.einsum("snd,jd->snj", orbit_pts, measure.w) + measure.b
    sig = act(z)  # (S, N, J)
    avg = sig.mean(axis=0)  # (N, J)
    num = avg ** 2 @ pa2
    den = sig[0] ** 2 @ pa2  # element 0 is the identity
    out = np.full(len(xs), np.nan)
    ok = den >= DENOM_FLOOR
    out[ok] = num[ok] / den[ok]
    return out


def ratio_at(measure: DiscreteMeasure, act: Activation, group: GroupAction,
             x: np.ndarray) -> float | None:
    """Group-averaged to plain second-moment ratio at one point.

    Returns None when the plain second moment is below the skip floor.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (measure.dim,):
        raise ValueError(
            f"point shape {x.shape} incompatible with measure dimension "
            f"{measure.dim}")
    if group.dim != measure.dim:
        raise ValueError(
            f"group dimension {group.dim} != measure dimension {measure.dim}")
    val = _moment_ratios(measure, act, group, x[None])[0]
    return None if math.isnan(val) else float(val)


def boundary_probes(spec: DomainSpec, n_probes: int) -> np.ndarray:
    """Deterministic boundary probe set.

    Cubes contribute their 2^d corners.  The disk contributes a
    power-of-two angular grid with at least sqrt(n_probes) points, so
    refined probe sets are supersets of coarser ones.
    """
    if spec.kind == "unit_disk":
        k = max(4, 2 ** math.ceil(math.log2(math.sqrt(max(n_probes, 4)))))
        ang = 2.0 * math.pi * np.arange(k) / k
        return np.column_stack([np.cos(ang), np.sin(ang)])
    lo = -1.0 if spec.kind == "cube_pm1" else 0.0
    grid = np.meshgrid(*[[lo, 1.0]] * spec.d, indexing="ij")
    return np.column_stack([g.ravel() for g in grid]).astype(np.float64)


def estimate_delta(measures, act: Activation, group: GroupAction,
                   domain: DomainSpec, n_probes: int = 10_000,
                   seed: int = 0) -> DeltaEstimate:
    """Probe-maximum estimate of delta* over a family of measures.

    The sup over the measure family is an exact max over the finitely
    many configured measures; the sup over the domain is the max over
    n_probes uniform samples plus the deterministic boundary probes.
    """
    if n_probes < 1000:
        raise ValueError(f"n_probes must be >= 1e3, got {n_probes}")
    if isinstance(measures, DiscreteMeasure):
        measures = [measures]
    xs = np.vstack([sample_domain(domain, n_probes, seed),
                    boundary_probes(domain, n_probes)])

    best = -np.inf
    best_x = None
    best_name = ""
    skipped = 0
    for k, measure in enumerate(measures):
        ratios = _moment_ratios(measure, act, group, xs)
        defined = ~np.isnan(ratios)
        skipped += int((~defined).sum())
        if not defined.any():
            continue
        i = int(np.nanargmax(ratios))
        if ratios[i] > best:
            best = float(ratios[i])
            best_x = xs[i].copy()
            best_name = measure.name or f"measure{k}"
    if best_x is None:
        raise DegenerateMeasureError(
            "every probe had a vanishing plain second moment; the measure "
            "family is degenerate on this domain")
    return DeltaEstimate(delta=min(1.0, best), delta_star=best,
                         argmax_x=best_x, argmax_measure=best_name,
                         n_probes=len(xs), skipped_probes=skipped)


def apothem_criterion(w: np.ndarray, b: float, n: int) -> bool:
    """Disjointness test for rotated half-planes on the unit disk.

    True when the neuron's active half-plane {w . x + b > 0} sits
    farther from the origin than the apothem of the inscribed regular
    n-gon, i.e. -b / ||w||_2 >= cos(pi / n); the n rotated copies are
    then pairwise disjoint on the disk.
    """
    w = np.asarray(w, dtype=np.float64)
    if b >= 0:
        raise ValueError(f"criterion applies to negative bias, got b = {b}")
    norm = float(np.linalg.norm(w))
    if norm == 0.0:
        raise ValueError("criterion needs a nonzero weight vector")
    return -b / norm >= math.cos(math.pi / n)


def subcube_orbit_count(k) -> int:
    """Number of distinct images of a subcube index under coordinate
    permutations: the multiset-permutation count d! / prod_v (mult_v!).
    """
    k = tuple(int(v) for v in k)
    d = len(k)
    if d > 7:
        raise ValueError(f"index length capped at 7, got {d}")
    count = math.factorial(d)
    for v in set(k):
        count //= math.factorial(k.count(v))
    return count
