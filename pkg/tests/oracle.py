"""Brute-force reference solver for the hull nearest-point problem.

Independent of the package's solver on purpose: enumerates every possible
support subset of the two point clouds, solves the equality-constrained
least-squares system on each, and keeps the best feasible candidate.  By
Caratheodory the optimal pair of hull points is a convex combination of
at most d+2 vertices in total, so the enumeration is exhaustive for the
small instances it is used on (d <= 4, <= 8 points per side).
"""

from __future__ import annotations

import itertools

import numpy as np


def _subset_candidate(P_sub: np.ndarray, N_sub: np.ndarray):
    """Distance-minimizing pair over the affine hulls with convexity check.

    Solves min ||sum_i a_i p_i - sum_j b_j n_j||^2 subject to sum a = 1,
    sum b = 1 via the KKT system, then rejects the candidate unless all
    coefficients are (numerically) nonnegative.
    """
    m1, m2 = len(P_sub), len(N_sub)
    k = m1 + m2
    B = np.vstack([P_sub, -N_sub])
    kkt = np.zeros((k + 2, k + 2))
    kkt[:k, :k] = 2.0 * (B @ B.T)
    kkt[:k, k] = kkt[k, :k] = [1.0] * m1 + [0.0] * m2
    kkt[:k, k + 1] = kkt[k + 1, :k] = [0.0] * m1 + [1.0] * m2
    rhs = np.zeros(k + 2)
    rhs[k] = rhs[k + 1] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0][:k]
    if np.any(sol < -1e-9):
        return None
    alpha = np.clip(sol[:m1], 0.0, None)
    beta = np.clip(sol[m1:], 0.0, None)
    sa, sb = alpha.sum(), beta.sum()
    if sa <= 0.0 or sb <= 0.0:
        return None
    x_plus = (alpha / sa) @ P_sub
    x_minus = (beta / sb) @ N_sub
    return x_plus, x_minus


def oracle_nearest_points(P: np.ndarray, N: np.ndarray):
    """Exact closest pair between conv(P) and conv(N) by exhaustive search.

    Returns (x_plus, x_minus, distance).  Cost grows combinatorially; meant
    for instances with at most ~8 points per side in dimension <= 4.
    """
    P = np.asarray(P, dtype=float)
    N = np.asarray(N, dtype=float)
    d = P.shape[1]
    max_total = d + 2
    best = None
    for a in range(1, min(len(P), max_total - 1) + 1):
        for b in range(1, min(len(N), max_total - a) + 1):
            for S_pos in itertools.combinations(range(len(P)), a):
                P_sub = P[list(S_pos)]
                for S_neg in itertools.combinations(range(len(N)), b):
                    cand = _subset_candidate(P_sub, N[list(S_neg)])
                    if cand is None:
                        continue
                    dist = float(np.linalg.norm(cand[0] - cand[1]))
                    if best is None or dist < best[2]:
                        best = (cand[0], cand[1], dist)
    assert best is not None  # singletons always produce a candidate
    return best


def oracle_margin(P: np.ndarray, N: np.ndarray):
    """Max-margin triple (y, b, d) for the Euclidean ball, or (0, 0, 0)."""
    x_plus, x_minus, dist = oracle_nearest_points(P, N)
    if dist == 0.0:
        return np.zeros(P.shape[1]), 0.0, 0.0
    y = (x_plus - x_minus) / dist
    b = float(-y @ (x_plus + x_minus) / 2.0)
    return y, b, dist / 2.0
