"""Path-norm-regularized ERM for invariant and plain shallow networks.

The estimator minimizes J(Theta) = empirical squared loss
+ lambda (path_norm^2 + 1) by full-batch subgradient descent with a
fixed step: deterministic and analyzable, which matters more than speed
at this scale.  The theoretically prescribed lambda is assembled from
the constant chain C1 -> C_sigma -> D_sigma -> Lambda_f -> R_f; it is
far too large to be usable directly at desk scale, so experiments run
both the prescribed value and a scaled-down variant and label each row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset, DomainSpec, make_dataset, sample_domain
from .groups import GroupAction
from .measures import TargetFunction
from .networks import NetParams, forward_invariant, grad_objective, objective, path_norm

C_ZETA = math.pi ** 2 / 6.0


class DivergenceError(RuntimeError):
    """Training hit a non-finite objective; carries the trace so far."""

    def __init__(self, message, trace):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class TheoryConstants:
    """The explicit constants of the generalization bound.

    Built from the activation constants and the target's Barron-norm
    bound B:
        C1       = (L + |sigma(0)|)(B + 1) + 1
        C_sigma  = max{8 gamma C1, 3 C1^2}
        D_sigma  = 4 C_sigma
        C_zeta   = pi^2 / 6
        Lambda_f(dc) = sqrt(2 log(2 C_zeta (sqrt(2) B + 1)^2 / dc)) + 2
        R_f(dc)      = 1 + (2 B^2 + 1) Lambda_f(dc)
    """

    lipschitz: float
    sigma0: float
    gamma: float
    barron_bound: float

    @property
    def c1(self) -> float:
        return (self.lipschitz + abs(self.sigma0)) * (self.barron_bound + 1.0) + 1.0

    @property
    def c_sigma(self) -> float:
        return max(8.0 * self.gamma * self.c1, 3.0 * self.c1 ** 2)

    @property
    def d_sigma(self) -> float:
        return 4.0 * self.c_sigma

    @property
    def c_zeta(self) -> float:
        return C_ZETA

    def lambda_f(self, delta_conf: float) -> float:
        B = self.barron_bound
        return math.sqrt(2.0 * math.log(
            2.0 * C_ZETA * (math.sqrt(2.0) * B + 1.0) ** 2 / delta_conf)) + 2.0

    def r_f(self, delta_conf: float) -> float:
        return 1.0 + (2.0 * self.barron_bound ** 2 + 1.0) * self.lambda_f(delta_conf)

    @classmethod
    def from_target(cls, target: TargetFunction) -> "TheoryConstants":
        L, s0, gamma = target.activation.constants()
        return cls(lipschitz=L, sigma0=s0, gamma=gamma,
                   barron_bound=target.barron_bound)


def lambda_min(consts: TheoryConstants, d: int, M: int, m: int,
               delta_hat: float) -> float:
    """Smallest regularization strength the generalization bound allows:

        max{ D_sigma sqrt(log(2d+2) / M),
             3 (L + |sigma(0)|)^2 delta_hat B^2 / m }.
    """
    stat = consts.d_sigma * math.sqrt(math.log(2.0 * d + 2.0) / M)
    approx = 3.0 * (consts.lipschitz + abs(consts.sigma0)) ** 2 \
        * delta_hat * consts.barron_bound ** 2 / m
    return max(stat, approx)


def risk_bound(consts: TheoryConstants, lam: float, m: int, M: int, d: int,
               delta_hat: float, tau0: float, delta_conf: float) -> float:
    """Right-hand side of the generalization bound on the L2(mu) error.

    Valid when lam satisfies lambda_min; numerically enormous at desk
    scale, which is expected: the experiments verify the chain computes
    finitely and dominates the measured errors, not tightness.
    """
    B2 = consts.barron_bound ** 2
    approx = 3.0 * (consts.lipschitz + abs(consts.sigma0)) ** 2 \
        * delta_hat * B2 / m
    reg = 2.0 * lam * (2.0 * B2 + 1.0)
    est = consts.d_sigma * (2.0 * B2 + 1.0) \
        * (consts.lambda_f(delta_conf) - 2.0) / math.sqrt(M)
    r_tail = consts.r_f(delta_conf) + tau0 / lam + 1.0
    conc = consts.d_sigma * r_tail * math.sqrt(
        2.0 * math.log(4.0 * C_ZETA * r_tail / delta_conf) / M)
    return approx + reg + est + conc


@dataclass(frozen=True)
class TrainConfig:
    m: int
    group: GroupAction | None
    lam: float
    step_size: float = 0.05
    iterations: int = 1500
    init_scale: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")


def init_params(m: int, d: int, init_scale: float, seed) -> NetParams:
    rng = np.random.default_rng(seed)
    return NetParams(
        a=rng.normal(0.0, init_scale, size=m),
        w=rng.normal(0.0, init_scale / math.sqrt(d), size=(m, d)),
        b=rng.normal(0.0, init_scale / math.sqrt(d), size=m),
    )


def train(data: Dataset, act, cfg: TrainConfig):
    """Full-batch subgradient descent on the regularized empirical risk.

    Returns (params, trace) where trace[k] is J before step k (final
    entry is J at the returned parameters).  Deterministic per config.
    """
    if data.M == 0:
        raise ValueError("empty dataset")
    params = init_params(cfg.m, data.dim, cfg.init_scale, cfg.seed)
    trace = []
    for _ in range(cfg.iterations):
        trace.append(objective(params, act, cfg.group, data.xs, data.ys,
                               cfg.lam))
        if not math.isfinite(trace[-1]):
            raise DivergenceError(
                f"objective diverged at iteration {len(trace) - 1}", trace)
        g = grad_objective(params, act, cfg.group, data.xs, data.ys, cfg.lam)
        params = NetParams(a=params.a - cfg.step_size * g.a,
                           w=params.w - cfg.step_size * g.w,
                           b=params.b - cfg.step_size * g.b)
    trace.append(objective(params, act, cfg.group, data.xs, data.ys, cfg.lam))
    if not math.isfinite(trace[-1]):
        raise DivergenceError("objective diverged at the final iterate", trace)
    return params, trace


@dataclass(frozen=True)
class GeneralizationRow:
    M: int
    seed: int
    lambda_used: float
    lambda_kind: str  # "theory" or "scaled"
    err_invariant: float
    err_plain: float
    path_norm_invariant: float
    path_norm_plain: float


def _generalization_job(args):
    (target, group, domain, m, M, data_seed, lam, kind, noise_tau,
     n_test, train_kwargs) = args
    data = make_dataset(target, domain, M, noise_tau, seed=[data_seed, M])
    xs_test = sample_domain(domain, n_test, seed=[data_seed, M, 7])
    f_test = target(xs_test)

    errs, norms = {}, {}
    for label, grp in (("invariant", group), ("plain", None)):
        cfg = TrainConfig(m=m, group=grp, lam=lam, seed=[data_seed, M, 11],
                          **train_kwargs)
        params, _ = train(data, target.activation, cfg)
        pred = forward_invariant(params, target.activation, grp, xs_test)
        errs[label] = float(np.mean((pred - f_test) ** 2))
        norms[label] = path_norm(params)
    return GeneralizationRow(
        M=M, seed=data_seed, lambda_used=lam, lambda_kind=kind,
        err_invariant=errs["invariant"], err_plain=errs["plain"],
        path_norm_invariant=norms["invariant"],
        path_norm_plain=norms["plain"])


def generalization_experiment(target: TargetFunction, group: GroupAction,
                              domain: DomainSpec, m: int, M_grid, seeds,
                              delta_hat: float, noise_tau: float = 1.0,
                              kappa: float = 100.0, n_test: int = 20_000,
                              step_size: float = 0.05, iterations: int = 1500,
                              init_scale: float = 1.0, map_fn=map):
    """Invariant-vs-plain test error across dataset sizes and seeds.

    For every (M, seed) cell a dataset is drawn once and both networks
    are trained twice: at the theory lambda from lambda_min and at the
    scaled-down lambda / kappa, each reported as its own row.  Test
    error is a Monte-Carlo L2 distance to the noise-free target on
    fresh domain samples.
    """
    if not M_grid:
        raise ValueError("M grid must be non-empty")
    if any(M < 1 for M in M_grid):
        raise ValueError(f"dataset sizes must be >= 1, got {list(M_grid)}")
    consts = TheoryConstants.from_target(target)
    train_kwargs = {"step_size": step_size, "iterations": iterations,
                    "init_scale": init_scale}
    jobs = []
    for M in sorted(M_grid):
        lam_theory = lambda_min(consts, target.dim, M, m, delta_hat)
        for kind, lam in (("theory", lam_theory),
                          ("scaled", lam_theory / kappa)):
            for s in seeds:
                jobs.append((target, group, domain, m, M, s, lam, kind,
                             noise_tau, n_test, train_kwargs))
    rows = list(map_fn(_generalization_job, jobs))
    return sorted(rows, key=lambda r: (r.M, r.lambda_kind, r.seed))
