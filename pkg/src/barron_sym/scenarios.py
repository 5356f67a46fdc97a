"""Builtin scenario registry: one configuration per hand-analyzable regime.

Each scenario fixes a group, an activation, a domain, and a parameter
measure whose symmetry factor is known in closed form (or pinned by a
dense-grid computation), and carries default knobs for every experiment
type.  They are the ground truth for the acceptance suite and double as
integration tests.

Regimes covered:
  reflection-disjoint   1D sign flip, half-lines apart      delta = 1/2
  reflection-overlap    1D sign flip, overlapping supports  delta ~ 1
  c4-corners            quarter rotations, corner caps      delta = 1/4
  cn-disk               C_6 on the disk, apothem satisfied  delta = 1/6
  s2-bump-offdiag       swap of two coords, disjoint slabs  delta = 1/2
  s2-bump-diag          swap-invariant slab                 delta = 1
  sd-bump               S_3; slabs meet only in pairs on
                        transposition planes                delta = 1/3

The sd-bump value needs a word: a ridge unit sigma(w . x + b) is
supported on a slab, and on [0,1]^3 every attainable level of w . x is
also attained on some plane {x_i = x_j}, so the six permuted slabs can
never be pairwise disjoint.  The configuration keeps the slab narrow
enough that at most two copies ever meet (2 (c - h) > c + h), which
pins the worst-case ratio at 2/|G| = 1/3.
"""

from __future__ import annotations

import copy

from .activations import make_activation
from .data import DomainSpec
from .groups import parse_group_spec
from .measures import DiscreteMeasure, TargetFunction, symmetrize


def _pairs_1d(pairs):
    """Atoms (p, a, w, b) for amplitude/weight/threshold triples in 1D."""
    p = 1.0 / len(pairs)
    return [{"p": p, "a": a, "w": [w], "b": -w * c} for a, w, c in pairs]


_BUILTIN = {
    "reflection-disjoint": {
        "scenario": "reflection-disjoint",
        "group": "reflection:1",
        "activation": "relu",
        "domain": {"kind": "cube_pm1", "d": 1},
        # Three scales with mixed-sign amplitudes: keeps the analytic
        # delta* = 1/2 (the ratio only sees a^2) while giving the
        # invariant sampling construction genuine variance, so the
        # paired error ratio is informative.
        "measure_atoms": _pairs_1d([(1.0, 1.0, 0.3), (-1.0, 1.3, 0.5),
                                    (0.9, 1.8, 0.7)]),
        "symmetrize": True,
        "expected_delta": [0.49, 0.51],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "scaling": {"m_grid": [16, 32, 64, 128, 256, 512, 1024],
                    "trials": 30, "n_mc": 20_000, "seed": 11},
        "generalize": {"M_grid": [64, 256, 1024], "seeds": list(range(10)),
                       "m": 24, "kappa": 2.0e4, "noise_tau": 1.0,
                       "n_test": 20_000, "step_size": 0.05,
                       "iterations": 1500, "init_scale": 1.0,
                       "delta_conf": 0.05},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "reflection-overlap": {
        "scenario": "reflection-overlap",
        "group": "reflection:1",
        "activation": "relu",
        "domain": {"kind": "cube_pm1", "d": 1},
        # positive bias: the two half-lines overlap around the origin
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [1.0], "b": 0.5}],
        "symmetrize": True,
        "expected_delta": [0.95, 1.0],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "c4-corners": {
        "scenario": "c4-corners",
        "group": "cyclic2d:4",
        "activation": "relu",
        "domain": {"kind": "cube_pm1", "d": 2},
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [1.0, 1.0], "b": -1.5}],
        "symmetrize": True,
        "expected_delta": [0.24, 0.26],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "cn-disk": {
        "scenario": "cn-disk",
        "group": "cyclic2d:6",
        "activation": "relu",
        "domain": {"kind": "unit_disk", "d": 2},
        # -b / ||w|| = 0.9 >= cos(pi/6): the six rotated caps are disjoint
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [1.0, 0.0], "b": -0.9}],
        "symmetrize": True,
        "expected_delta": [1.0 / 6.0 * 0.9, 1.0 / 6.0 * 1.1],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "s2-bump-offdiag": {
        "scenario": "s2-bump-offdiag",
        "group": "symmetric:2",
        "activation": "bump:0.25",
        "domain": {"kind": "unit_cube", "d": 2},
        # slab through the center of subcube (0, 1); the swapped copy
        # runs through (1, 0) and the two never meet
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [1.0, -1.0], "b": 0.5}],
        "symmetrize": True,
        "expected_delta": [0.45, 0.55],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "s2-bump-diag": {
        "scenario": "s2-bump-diag",
        "group": "symmetric:2",
        "activation": "bump:0.25",
        "domain": {"kind": "unit_cube", "d": 2},
        # slab along the diagonal is swap-invariant: supports coincide
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [1.0, -1.0], "b": 0.0}],
        "symmetrize": True,
        "expected_delta": [0.95, 1.0],
        "delta": {"n_probes": 10_000, "seed": 2024},
        "rademacher": {"M": 64, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
    "sd-bump": {
        "scenario": "sd-bump",
        "group": "symmetric:3",
        "activation": "bump:0.1",
        "domain": {"kind": "unit_cube", "d": 3},
        # levels x_j - x_i in [0.5, 0.7]: two slabs can meet (on the
        # transposition planes) but never three, since 2 * 0.5 > 0.7
        "measure_atoms": [{"p": 1.0, "a": 1.0, "w": [-1.0, 0.0, 1.0],
                           "b": -0.6}],
        "symmetrize": True,
        "expected_delta": [0.30, 0.36],
        "delta": {"n_probes": 20_000, "seed": 2024},
        "rademacher": {"M": 32, "Q": 1.0, "n_sign_draws": 64,
                       "restarts": 8, "ascent_steps": 120, "seed": 5},
    },
}

SCENARIO_IDS = tuple(_BUILTIN)


def scenario_config(scenario_id: str) -> dict:
    """A deep copy of the builtin config dict for a scenario."""
    if scenario_id not in _BUILTIN:
        raise KeyError(
            f"unknown scenario {scenario_id!r}; builtin ids: {SCENARIO_IDS}")
    return copy.deepcopy(_BUILTIN[scenario_id])


def build_scenario(config: dict):
    """Materialize (group, activation, domain, measure, target) from a
    scenario-shaped config dict."""
    group = parse_group_spec(config["group"])
    act = make_activation(config["activation"])
    domain = DomainSpec(kind=config["domain"]["kind"], d=config["domain"]["d"])
    measure = DiscreteMeasure.from_atoms(
        config["measure_atoms"], name=config.get("scenario", "measure"))
    if config.get("symmetrize", False):
        measure = symmetrize(measure, group)
    target = TargetFunction(measure=measure, activation=act,
                            invariant_under=group.name
                            if config.get("symmetrize") else None)
    return group, act, domain, measure, target
