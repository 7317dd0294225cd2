"""Maximum-margin separation of two growing point clouds.

The learners repeatedly need the classifier maximizing

    h(y, b) = min( min_{x in P} (y.x + b),  min_{x in N} (-y.x - b) )

over the dual-norm ball ``||y||_* <= 1``.  For the Euclidean cost norm the
optimum reduces exactly to the nearest pair of points between the two
convex hulls: the optimal direction is the unit vector along that pair,
the margin is half its length, and the intercept centers it.  That
reduction is solved here with a pairwise Frank-Wolfe iteration over the
Minkowski-difference vertex set, which hands back convex-combination
witnesses suitable for warm starts as the clouds grow.  Other norms get a
best-effort projected supergradient ascent.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .norms import EPS_GEOM, CostModel, dual_norm_eval

logger = logging.getLogger(__name__)

# Declare the clouds inseparable when the achievable margin is this many
# solver tolerances or less.
_INSEPARABLE_FACTOR = 10.0


class SolverError(RuntimeError):
    """Raised when an exact solve fails to converge within the iteration cap."""


class PointSetPair:
    """Positive and negative point clouds with cheap appends.

    Backed by doubling arrays; ``positives``/``negatives`` are views, so
    callers must not hold them across appends.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self._pos = np.empty((8, dim))
        self._neg = np.empty((8, dim))
        self._n_pos = 0
        self._n_neg = 0

    @classmethod
    def from_arrays(cls, positives, negatives) -> "PointSetPair":
        positives = np.atleast_2d(np.asarray(positives, dtype=float))
        negatives = np.atleast_2d(np.asarray(negatives, dtype=float))
        if positives.shape[1] != negatives.shape[1]:
            raise ValueError("positive and negative points disagree on dimension")
        pair = cls(positives.shape[1])
        for x in positives:
            pair.add(x, 1)
        for x in negatives:
            pair.add(x, -1)
        return pair

    @property
    def positives(self) -> np.ndarray:
        return self._pos[: self._n_pos]

    @property
    def negatives(self) -> np.ndarray:
        return self._neg[: self._n_neg]

    @property
    def n_pos(self) -> int:
        return self._n_pos

    @property
    def n_neg(self) -> int:
        return self._n_neg

    def add(self, x, label: int) -> None:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected point of shape ({self.dim},), got {x.shape}")
        if label == 1:
            if self._n_pos == self._pos.shape[0]:
                self._pos = np.vstack([self._pos, np.empty_like(self._pos)])
            self._pos[self._n_pos] = x
            self._n_pos += 1
        elif label == -1:
            if self._n_neg == self._neg.shape[0]:
                self._neg = np.vstack([self._neg, np.empty_like(self._neg)])
            self._neg[self._n_neg] = x
            self._n_neg += 1
        else:
            raise ValueError(f"label must be +1 or -1, got {label}")


def margin_h(y, b: float, sets: PointSetPair) -> float:
    """Evaluate the concave margin objective h(y, b) on the point pair."""
    if sets.n_pos == 0 or sets.n_neg == 0:
        raise ValueError("margin_h requires at least one point of each label")
    y = np.asarray(y, dtype=float)
    return float(min(np.min(sets.positives @ y) + b, -np.max(sets.negatives @ y) - b))


@dataclass(eq=False)
class NearestPoints:
    """Closest pair between the convex hulls, with its convex certificates.

    ``weights`` is a pair of dictionaries mapping vertex indices in the
    positive/negative clouds to convex coefficients (each summing to one);
    ``gap`` is the final Frank-Wolfe gap on the squared distance
    objective.
    """

    x_plus: np.ndarray
    x_minus: np.ndarray
    gap: float
    weights: tuple[dict[int, float], dict[int, float]]
    iterations: int


def _combination(weights, P, N):
    wp, wn = weights
    x_plus = np.zeros(P.shape[1])
    for i, w in wp.items():
        x_plus += w * P[i]
    x_minus = np.zeros(N.shape[1])
    for j, w in wn.items():
        x_minus += w * N[j]
    return x_plus, x_minus


def _clean_weights(raw: dict[int, float], limit: int) -> dict[int, float]:
    out = {int(i): w for i, w in raw.items() if w > 0.0 and 0 <= i < limit}
    if not out:
        return {0: 1.0}
    total = sum(out.values())
    return {i: w / total for i, w in out.items()}


def _affine_polish(wp, wn, P, N):
    """Minimize over the current active vertices exactly (Wolfe minor cycles).

    Solves the equality-constrained least-squares problem on the active
    sets and walks the feasible iterate toward that affine minimizer,
    dropping vertices whose coefficients hit zero, until the affine
    minimizer itself is feasible.  Never increases the objective; snaps
    the iterate onto the optimal face once the active set contains the
    true support, which the outer Frank-Wolfe certificate then verifies.
    """
    idx_p = list(wp)
    idx_n = list(wn)
    v = np.array([wp[i] for i in idx_p] + [wn[j] for j in idx_n])
    for _ in range(len(v) + 2):
        m1 = len(idx_p)
        B = np.vstack([P[idx_p], -N[idx_n]])
        G = 2.0 * (B @ B.T)
        k = len(v)
        kkt = np.zeros((k + 2, k + 2))
        kkt[:k, :k] = G
        kkt[:k, k] = kkt[k, :k] = np.concatenate([np.ones(m1), np.zeros(k - m1)])
        kkt[:k, k + 1] = kkt[k + 1, :k] = np.concatenate([np.zeros(m1), np.ones(k - m1)])
        rhs = np.zeros(k + 2)
        rhs[k] = rhs[k + 1] = 1.0
        try:
            v_aff = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
        except np.linalg.LinAlgError:
            break
        if np.all(v_aff >= -1e-12):
            v = np.clip(v_aff, 0.0, None)
            break
        neg = v_aff < -1e-12
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = v[neg] / (v[neg] - v_aff[neg])
        theta = float(np.min(ratios))
        v = np.clip((1.0 - theta) * v + theta * v_aff, 0.0, None)
        keep_p = [t for t, i in enumerate(idx_p) if v[t] > 0.0]
        keep_n = [t for t, j in enumerate(idx_n) if v[m1 + t] > 0.0]
        if not keep_p or not keep_n:
            return wp, wn, np.subtract(*_combination((wp, wn), P, N))
        v = np.concatenate([v[keep_p], v[[m1 + t for t in keep_n]]])
        idx_p = [idx_p[t] for t in keep_p]
        idx_n = [idx_n[t] for t in keep_n]
    m1 = len(idx_p)
    alpha = v[:m1]
    beta = v[m1:]
    if alpha.sum() <= 0.0 or beta.sum() <= 0.0:
        return wp, wn, np.subtract(*_combination((wp, wn), P, N))
    alpha = alpha / alpha.sum()
    beta = beta / beta.sum()
    new_wp = {i: a for i, a in zip(idx_p, alpha) if a > 0.0}
    new_wn = {j: b for j, b in zip(idx_n, beta) if b > 0.0}
    if not new_wp or not new_wn:
        return wp, wn, np.subtract(*_combination((wp, wn), P, N))
    u_new = np.subtract(*_combination((new_wp, new_wn), P, N))
    u_old = np.subtract(*_combination((wp, wn), P, N))
    if float(u_new @ u_new) > float(u_old @ u_old):
        return wp, wn, u_old
    return new_wp, new_wn, u_new


def _wolfe_burst(wp, wn, u, P, N, tol):
    """Wolfe major cycles: pull the current supporting vertices into the
    active set and re-polish until the duality gap certifies ``tol``.

    Pairwise steps alone crawl when the optimal face is spanned by
    near-duplicate vertices (noisy pools produce these): each step moves
    weight between points a noise-width apart and progress per iteration
    collapses.  Adding the protruding vertex to the active set before
    the affine solve restores finite termination on such faces.
    """
    best = float(u @ u)
    for _ in range(24):
        sp = P @ u
        sn = N @ u
        i_fw = int(np.argmin(sp))
        j_fw = int(np.argmax(sn))
        usq = float(u @ u)
        gap = 2.0 * (usq - (float(sp[i_fw]) - float(sn[j_fw])))
        if math.sqrt(usq) <= tol or gap <= 2.0 * tol * math.sqrt(usq):
            break
        wp.setdefault(i_fw, 0.0)
        wn.setdefault(j_fw, 0.0)
        wp, wn, u = _affine_polish(wp, wn, P, N)
        wp = {i: w for i, w in wp.items() if w > 0.0}
        wn = {j: w for j, w in wn.items() if w > 0.0}
        nsq = float(u @ u)
        if nsq >= best:
            break
        best = nsq
    return wp, wn, u


def nearest_points_convex_hulls(
    sets: PointSetPair,
    tol: float = 1e-10,
    max_iter: int = 200_000,
    warm: tuple[dict[int, float], dict[int, float]] | None = None,
) -> NearestPoints:
    """Minimize ``||x_plus - x_minus||_2`` over the two convex hulls.

    Block pairwise Frank-Wolfe on the product of the two vertex
    simplices: each step picks the hull with the larger internal gap and
    shifts weight from its worst active vertex to its best supporting
    vertex with exact line search on the squared-distance objective,
    falling back to a vanilla Frank-Wolfe step whenever neither pairwise
    direction can make progress.  (Moving weight within one hull at a
    time matters: coupling the hulls into vertex *pairs* cripples the
    away step on degenerate faces and the rate drops to O(1/t).)
    Terminates when the Frank-Wolfe gap certifies the distance to within
    ``tol``, or the iterate's length itself drops to ``tol``, which means
    the hulls intersect to solver precision.  Warm starts reuse a
    previous weight pair; indices stay valid because clouds only grow.

    Raises SolverError if the cap is hit before the certificate holds.
    """
    if sets.n_pos == 0 or sets.n_neg == 0:
        raise ValueError("nearest_points_convex_hulls requires nonempty clouds")
    P = sets.positives
    N = sets.negatives

    if warm:
        wp = _clean_weights(warm[0], sets.n_pos)
        wn = _clean_weights(warm[1], sets.n_neg)
    else:
        wp, wn = {0: 1.0}, {0: 1.0}
    x_plus, x_minus = _combination((wp, wn), P, N)
    u = x_plus - x_minus

    gap = np.inf
    for it in range(max_iter):
        if it % 64 == 63:
            # periodic recomputation keeps float drift out of the iterate
            wp = _clean_weights(wp, sets.n_pos)
            wn = _clean_weights(wn, sets.n_neg)
            u = np.subtract(*_combination((wp, wn), P, N))
        if it % 128 == 1:
            wp, wn, u = _wolfe_burst(wp, wn, u, P, N, tol)

        sp = P @ u
        sn = N @ u
        i_fw = int(np.argmin(sp))
        j_fw = int(np.argmax(sn))
        s_val = sp[i_fw] - sn[j_fw]
        usq = float(u @ u)
        unorm = math.sqrt(usq)
        gap = 2.0 * (usq - s_val)
        if unorm <= tol or gap <= 2.0 * tol * unorm:
            x_plus, x_minus = _combination((wp, wn), P, N)
            return NearestPoints(x_plus, x_minus, gap, (wp, wn), it)

        i_away = max(wp, key=sp.__getitem__)
        j_away = min(wn, key=sn.__getitem__)
        gap_pos = float(sp[i_away] - sp[i_fw])
        gap_neg = float(sn[j_fw] - sn[j_away])

        stepped = False
        if gap_pos >= gap_neg and gap_pos > 0.0:
            e = P[i_fw] - P[i_away]
            ee = float(e @ e)
            if ee > 0.0:
                step = min(gap_pos / ee, wp[i_away])
                wp[i_fw] = wp.get(i_fw, 0.0) + step
                remaining = wp[i_away] - step
                if remaining <= 1e-16:
                    del wp[i_away]
                else:
                    wp[i_away] = remaining
                u = u + step * e
                stepped = True
        elif gap_neg > 0.0:
            e = N[j_fw] - N[j_away]
            ee = float(e @ e)
            if ee > 0.0:
                step = min(gap_neg / ee, wn[j_away])
                wn[j_fw] = wn.get(j_fw, 0.0) + step
                remaining = wn[j_away] - step
                if remaining <= 1e-16:
                    del wn[j_away]
                else:
                    wn[j_away] = remaining
                u = u - step * e
                stepped = True
        if not stepped:
            # vanilla step: contract both hulls toward the supporting pair
            d_vec = (P[i_fw] - N[j_fw]) - u
            denom = float(d_vec @ d_vec)
            if denom == 0.0:
                x_plus, x_minus = _combination((wp, wn), P, N)
                return NearestPoints(x_plus, x_minus, gap, (wp, wn), it)
            step = min(max((usq - s_val) / denom, 0.0), 1.0)
            keep = 1.0 - step
            wp = {i: w * keep for i, w in wp.items() if w * keep > 1e-16}
            wn = {j: w * keep for j, w in wn.items() if w * keep > 1e-16}
            wp[i_fw] = wp.get(i_fw, 0.0) + step
            wn[j_fw] = wn.get(j_fw, 0.0) + step
            u = u + step * d_vec

    raise SolverError(
        f"nearest-point iteration cap {max_iter} reached with gap {gap:.3e} > tol {tol:.3e}"
    )


@dataclass(frozen=True, eq=False)
class MarginSolution:
    """Solution of the max-margin problem over the dual-norm ball.

    When separable, ``y`` has unit dual norm, ``d > 0`` is the achieved
    margin, and the witnesses satisfy ``d = ||x_plus - x_minus|| / 2``,
    ``b = -y.(x_plus + x_minus)/2`` and ``y.(x_plus - x_minus) =
    ||x_plus - x_minus|| ||y||_*`` on the exact (l2) path.  When not
    separable the classifier degenerates to (0, 0) with d = 0.
    """

    y: np.ndarray
    b: float
    d: float
    x_plus: np.ndarray
    x_minus: np.ndarray
    separable: bool
    support_weights: tuple[dict[int, float], dict[int, float]] | None = None
    gap: float = 0.0
    converged: bool = True


def solve_max_margin(
    sets: PointSetPair,
    m: CostModel,
    tol: float = 1e-10,
    warm: tuple[dict[int, float], dict[int, float]] | None = None,
) -> MarginSolution:
    """Maximize h(y, b) subject to ``||y||_* <= 1``.

    The Euclidean cost norm is solved exactly through the nearest-points
    reduction; every other norm runs a projected supergradient ascent with
    dual-norm renormalization (best effort: the returned margin is a lower
    bound on the optimum, within ten tolerances of it on well-conditioned
    instances).  A margin at or below ``10 * tol`` is reported as
    inseparable with the degenerate (0, 0) classifier.
    """
    if sets.n_pos == 0 or sets.n_neg == 0:
        raise ValueError("solve_max_margin requires at least one point of each label")
    if m.norm.kind == "l2":
        return _solve_l2(sets, tol, warm)
    # ascent cannot certify tighter than ~1e-8 in double precision
    return _solve_subgradient(sets, m, max(tol, 1e-8))


def _inseparable(
    sets: PointSetPair, res: NearestPoints | None = None, converged: bool = True
) -> MarginSolution:
    dim = sets.dim
    return MarginSolution(
        y=np.zeros(dim),
        b=0.0,
        d=0.0,
        x_plus=res.x_plus if res is not None else sets.positives[0].copy(),
        x_minus=res.x_minus if res is not None else sets.negatives[0].copy(),
        separable=False,
        support_weights=res.weights if res is not None else None,
        gap=res.gap if res is not None else 0.0,
        converged=converged,
    )


def _solve_l2(sets, tol, warm) -> MarginSolution:
    res = nearest_points_convex_hulls(sets, tol=tol, warm=warm)
    u = res.x_plus - res.x_minus
    dist = float(np.linalg.norm(u))
    if dist / 2.0 <= _INSEPARABLE_FACTOR * tol:
        return _inseparable(sets, res)
    y = u / dist
    return MarginSolution(
        y=y,
        b=float(-y @ (res.x_plus + res.x_minus) / 2.0),
        d=dist / 2.0,
        x_plus=res.x_plus,
        x_minus=res.x_minus,
        separable=True,
        support_weights=res.weights,
        gap=res.gap,
    )


def _solve_subgradient(
    sets: PointSetPair,
    m: CostModel,
    tol: float,
    max_iter: int = 100_000,
    epoch_len: int = 250,
    patience: int = 12,
) -> MarginSolution:
    """Projected supergradient ascent over the dual-norm ball.

    Fixed step within an epoch; an epoch that fails to improve the best
    objective by ``tol`` halves the step and restarts from the incumbent.
    Terminates on a step-size floor or after ``patience`` stalled epochs.
    """
    P = sets.positives
    N = sets.negatives
    scale = max(float(np.max(np.linalg.norm(P, axis=1))), float(np.max(np.linalg.norm(N, axis=1))), 1e-12)
    step0 = 1.0 / scale

    y = np.mean(P, axis=0) - np.mean(N, axis=0)
    dn = dual_norm_eval(m, y)
    if dn <= 1e-15:
        y = np.zeros(sets.dim)
        y[0] = 1.0
        dn = dual_norm_eval(m, y)
    y = y / dn

    def objective(yv):
        return 0.5 * (float(np.min(P @ yv)) - float(np.max(N @ yv)))

    best_val = objective(y)
    best_y = y.copy()
    step = step0
    stalled = 0
    total = 0
    converged = True
    while total < max_iter:
        epoch_best = best_val
        for _ in range(epoch_len):
            mp = P @ y
            mn = N @ y
            i = int(np.argmin(mp))
            j = int(np.argmax(mn))
            val = 0.5 * (mp[i] - mn[j])
            if val > best_val:
                best_val = val
                best_y = y.copy()
            y = y + step * 0.5 * (P[i] - N[j])
            dn = dual_norm_eval(m, y)
            if dn > 1.0:
                y = y / dn
            total += 1
        if best_val > epoch_best + tol:
            stalled = 0
        else:
            stalled += 1
            step *= 0.5
            y = best_y.copy()
            if stalled >= patience or step < 1e-13 * step0:
                break
    else:
        converged = False
        logger.warning(
            "max-margin supergradient ascent hit the %d-iteration cap; "
            "returning best objective %.3e",
            max_iter,
            best_val,
        )

    y = best_y / dual_norm_eval(m, best_y)
    mp = P @ y
    mn = N @ y
    i = int(np.argmin(mp))
    j = int(np.argmax(mn))
    d = 0.5 * (mp[i] - mn[j])
    if d <= _INSEPARABLE_FACTOR * tol:
        return _inseparable(sets, converged=converged)
    return MarginSolution(
        y=y,
        b=float(-0.5 * (mp[i] + mn[j])),
        d=float(d),
        x_plus=P[i].copy(),
        x_minus=N[j].copy(),
        separable=True,
        support_weights=None,
        gap=np.nan,
        converged=converged,
    )


def incremental_check(sol: MarginSolution, point, label: int) -> bool:
    """Whether a freshly stored point leaves the cached solution optimal.

    True iff the point already clears the cached margin, in which case the
    optimum of the enlarged problem is unchanged and the re-solve can be
    skipped; a small slack avoids re-solving on float-level ties.
    """
    point = np.asarray(point, dtype=float)
    return label * (float(sol.y @ point) + sol.b) >= sol.d - EPS_GEOM
