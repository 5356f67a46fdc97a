"""Empirical Rademacher complexity estimators and closed-form bounds.

The complexity of the norm-bounded group-averaged network class reduces
to a single-neuron problem: the supremum over the l1 ball of

    F(u) = sum_i xi_i (1/|G|) sum_g relu(u . (g x_i, 1)),

scaled by 2 gamma Q / M.  The inner supremum is maximized by projected
subgradient ascent with multiple restarts; tiny instances are cross-
checked against exhaustive vertex-plus-grid search in the tests.  The
plain linear class needs no ascent at all: the supremum of u . v over
the l1 ball is the sup norm of v.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupAction


@dataclass(frozen=True)
class RademacherResult:
    estimate: float
    bound: float
    n_sign_draws: int
    ascent_restarts: int
    stderr: float


def project_l1_ball(v: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Euclidean projection of each row of v onto the l1 ball.

    Rows already inside the ball are returned unchanged; the rest get
    the usual sorted-cumsum simplex shift applied to their magnitudes.
    """
    v = np.atleast_2d(np.asarray(v, dtype=np.float64))
    out = v.copy()
    norms = np.abs(v).sum(axis=1)
    todo = norms > radius
    if not todo.any():
        return out
    mag = np.abs(v[todo])
    srt = -np.sort(-mag, axis=1)
    csum = np.cumsum(srt, axis=1) - radius
    k = np.arange(1, v.shape[1] + 1)
    cond = srt - csum / k > 0
    rho = v.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = csum[np.arange(len(mag)), rho] / (rho + 1.0)
    out[todo] = np.sign(v[todo]) * np.maximum(mag - theta[:, None], 0.0)
    return out


def rademacher_bound(Q: float, d: int, M: int, gamma: float = 1.0) -> float:
    """Closed-form complexity bound 4 gamma Q sqrt(log(2d+2) / M)."""
    return 4.0 * gamma * Q * np.sqrt(np.log(2.0 * d + 2.0) / M)


def lemma_linear_bound(S: np.ndarray) -> float:
    """max_i ||x_i||_inf sqrt(2 log(2d) / M) for the unit-l1-ball linear class."""
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    M, d = S.shape
    return float(np.max(np.abs(S)) * np.sqrt(2.0 * np.log(2.0 * d) / M))


def _sign_patterns(M: int) -> np.ndarray:
    ks = np.arange(2 ** M, dtype=np.uint64)
    bits = (ks[:, None] >> np.arange(M, dtype=np.uint64)[None, :]) & 1
    return bits.astype(np.float64) * 2.0 - 1.0


def rademacher_linear(S, n_sign_draws: int | None = 256, seed=0) -> float:
    """(1/M) E_xi ||sum_i xi_i x_i||_inf for the unit-l1-ball linear class.

    The inner supremum is exact (sup of a linear functional over the l1
    ball is the sup norm).  n_sign_draws None enumerates all 2^M sign
    patterns, turning the outer expectation exact as well (M <= 20).
    """
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    M = len(S)
    if M == 0:
        raise ValueError("empty sample set")
    if n_sign_draws is None:
        if M > 20:
            raise ValueError(f"exhaustive mode needs M <= 20, got {M}")
        xi = _sign_patterns(M)
    else:
        rng = np.random.default_rng(seed)
        xi = rng.choice([-1.0, 1.0], size=(n_sign_draws, M))
    return float(np.abs(xi @ S).max(axis=1).mean() / M)


def _augmented_orbit(S: np.ndarray, group: GroupAction | None) -> np.ndarray:
    """(M, |G|, d+1) array of orbit points with the bias coordinate."""
    S = np.atleast_2d(np.asarray(S, dtype=np.float64))
    if group is None or group.order == 1:
        pts = S[:, None, :]
    else:
        pts = np.einsum("sij,nj->nsi", group.stacked(), S)
    ones = np.ones(pts.shape[:2] + (1,))
    return np.concatenate([pts, ones], axis=2)


def l1_vertices(dim: int) -> np.ndarray:
    """The 2*dim vertices +-e_k of the unit l1 ball."""
    eye = np.eye(dim)
    return np.vstack([eye, -eye])


def _ascend(pts: np.ndarray, xi: np.ndarray, restarts: int, steps: int,
            rng) -> np.ndarray:
    """Best objective value per sign draw.

    pts: (M, S, D) augmented orbit points, xi: (K, M) sign draws.
    Runs all draws and restarts as one batch; each iterate takes a
    subgradient step with rate 0.1/sqrt(t) and projects back onto the
    l1 ball.  Tracks the best value seen along the trajectory.
    """
    M, S, D = pts.shape
    K = len(xi)
    verts = l1_vertices(D)
    n_vert = min(restarts // 2, len(verts))
    starts = np.empty((K, restarts, D))
    if len(verts) <= n_vert:
        starts[:, :len(verts)] = verts  # small D: cover every vertex
        n_vert = len(verts)
    else:
        idx = rng.integers(0, len(verts), size=(K, n_vert))
        starts[:, :n_vert] = verts[idx]
    interior = rng.uniform(-1.0, 1.0, size=(K, restarts - n_vert, D))
    starts[:, n_vert:] = project_l1_ball(
        interior.reshape(-1, D)).reshape(K, restarts - n_vert, D)

    flat_pts = pts.reshape(M * S, D)
    xi_rep = np.repeat(xi, restarts, axis=0)  # (K*restarts, M)
    u = starts.reshape(K * restarts, D)

    def value_and_grad(u):
        z = u @ flat_pts.T  # (R, M*S)
        act = np.maximum(z, 0.0).reshape(-1, M, S).mean(axis=2)
        vals = np.einsum("rm,rm->r", xi_rep, act)
        live = (z > 0).astype(np.float64).reshape(-1, M, S)
        grad = np.einsum("rms,rm,msd->rd", live, xi_rep, pts) / S
        return vals, grad

    best = np.zeros(K * restarts)  # u = 0 is feasible, so sup >= 0
    for t in range(steps):
        vals, grad = value_and_grad(u)
        best = np.maximum(best, vals)
        u = project_l1_ball(u + (0.1 / np.sqrt(t + 1.0)) * grad)
    vals, _ = value_and_grad(u)
    best = np.maximum(best, vals)
    return best.reshape(K, restarts).max(axis=1)


def rademacher_invariant_neuron(S, group: GroupAction | None, Q: float,
                                n_sign_draws: int = 256, restarts: int = 16,
                                ascent_steps: int = 200, seed=0,
                                gamma: float = 1.0,
                                exhaustive_signs: bool = False
                                ) -> RademacherResult:
    """Complexity estimate for the norm-Q group-averaged network class.

    The network-class supremum is reduced to the single-neuron l1-ball
    problem with the 2 gamma Q / M factor folded in; `group` None or
    trivial gives the non-invariant reference class on the same sample.
    exhaustive_signs enumerates all 2^M sign patterns (then stderr is 0).
    """
    if Q <= 0:
        raise ValueError(f"norm radius must be positive, got {Q}")
    pts = _augmented_orbit(S, group)
    M = len(pts)
    d = pts.shape[2] - 1
    rng = np.random.default_rng(seed)
    if exhaustive_signs:
        if M > 16:
            raise ValueError(f"exhaustive mode needs M <= 16, got {M}")
        xi = _sign_patterns(M)
    else:
        xi = rng.choice([-1.0, 1.0], size=(n_sign_draws, M))
    sups = _ascend(pts, xi, restarts, ascent_steps, rng)
    scale = 2.0 * gamma * Q / M
    est = float(scale * sups.mean())
    stderr = 0.0 if exhaustive_signs else float(
        scale * sups.std(ddof=1) / np.sqrt(len(sups)))
    return RademacherResult(
        estimate=est,
        bound=float(rademacher_bound(Q, d, M, gamma)),
        n_sign_draws=len(xi),
        ascent_restarts=restarts,
        stderr=stderr,
    )


def vector_contraction_check(S, group: GroupAction, tol: float = 1e-12) -> bool:
    """Exhaustively verify the contraction step of the complexity bound.

    On the fixed family of l1-ball vertices, compares

        E_xi sup_u sum_i xi_i avg_s relu(u . (g_s x_i, 1))

    against sqrt(2)/sqrt(|G|) times the doubly-indexed linear relaxation

        E_xi' sup_u sum_i sum_s xi'_is (u . (g_s x_i, 1)),

    with both expectations enumerated exactly.  Keeps the sqrt(2) even
    for |G| = 1, where the scalar contraction constant could drop it.
    """
    pts = _augmented_orbit(S, group)
    M, S_, D = pts.shape
    if M > 8 or S_ > 4 or M * S_ > 20:
        raise ValueError(
            f"enumeration guard: need M <= 8, |G| <= 4, M|G| <= 20; "
            f"got M = {M}, |G| = {S_}")
    verts = l1_vertices(D)

    # left side: scalar signs against the averaged relu
    relu_vals = np.maximum(np.einsum("vd,msd->vms", verts, pts), 0.0)
    avg = relu_vals.mean(axis=2)  # (V, M)
    xi = _sign_patterns(M)
    lhs = (xi @ avg.T).max(axis=1).mean()

    # right side: doubly indexed signs against the linear coordinates
    lin = np.einsum("vd,msd->vms", verts, pts).reshape(len(verts), M * S_)
    rhs_total = 0.0
    n_pat = 2 ** (M * S_)
    chunk = 1 << 16
    for start in range(0, n_pat, chunk):
        ks = np.arange(start, min(start + chunk, n_pat), dtype=np.uint64)
        bits = (ks[:, None] >> np.arange(M * S_, dtype=np.uint64)[None, :]) & 1
        pat = bits.astype(np.float64) * 2.0 - 1.0
        rhs_total += (pat @ lin.T).max(axis=1).sum()
    rhs = rhs_total / n_pat

    return bool(lhs <= np.sqrt(2.0 / S_) * rhs + tol)
