"""Mistake and manipulation certificates for the online learners.

The guarantees are geometric: they depend on the dataset only through a
handful of Euclidean radii, inflated by the manipulation reach ``2/c``
times the envelope constant of the cost norm, and on the benchmark margin
``d_*``.  Certificates that do not apply (margin not exceeding the reach,
or a cone hypothesis the benchmark violates) are reported as unbounded or
rejected — never silently computed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .learners import ConeKind
from .norms import CostModel, dual_norm_eval, l2_envelope_constant


class HypothesisViolation(ValueError):
    """The benchmark does not satisfy the hypothesis a certificate assumes."""


@dataclass(frozen=True, eq=False)
class Benchmark:
    """Reference classifier with its margin on the true data."""

    y_star: np.ndarray
    b_star: float
    d_star: float

    def __post_init__(self):
        object.__setattr__(self, "y_star", np.asarray(self.y_star, dtype=float))
        if not (self.d_star > 0):
            raise ValueError(f"benchmark margin must be positive, got {self.d_star}")


@dataclass(frozen=True)
class DatasetConstants:
    """Euclidean radii of the agent population and their reach-inflated forms.

    ``D`` bounds feature norms, ``D_pm`` half the diameter of all agents,
    ``D_plus``/``D_minus`` half the per-class diameters.  The tilde values
    add ``(2/c) * C`` — the farthest any proxy can sit from the true
    feature vector — and ``D_bar`` is the larger inflated class radius.
    """

    D: float
    D_pm: float
    D_plus: float
    D_minus: float
    C: float
    reach: float

    @property
    def D_tilde(self) -> float:
        return self.D + self.reach * self.C

    @property
    def D_tilde_pm(self) -> float:
        return self.D_pm + self.reach * self.C

    @property
    def D_tilde_plus(self) -> float:
        return self.D_plus + self.reach * self.C

    @property
    def D_tilde_minus(self) -> float:
        return self.D_minus + self.reach * self.C

    @property
    def D_bar(self) -> float:
        return max(self.D_tilde_plus, self.D_tilde_minus)


def _half_diameter(X: np.ndarray, chunk: int = 512) -> float:
    """Half the largest pairwise Euclidean distance (0 for < 2 points)."""
    n = X.shape[0]
    if n < 2:
        return 0.0
    sq = np.einsum("ij,ij->i", X, X)
    best = 0.0
    for start in range(0, n, chunk):
        block = X[start : start + chunk]
        d2 = sq[start : start + chunk, None] + sq[None, :] - 2.0 * block @ X.T
        best = max(best, float(np.max(d2)))
    return 0.5 * math.sqrt(max(best, 0.0))


def dataset_constants(features, labels, m: CostModel) -> DatasetConstants:
    """Measure the radii of a finite agent population under the cost model."""
    X = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("dataset_constants requires a nonempty 2-D feature array")
    return DatasetConstants(
        D=float(np.max(np.linalg.norm(X, axis=1))),
        D_pm=_half_diameter(X),
        D_plus=_half_diameter(X[labels == 1]),
        D_minus=_half_diameter(X[labels == -1]),
        C=l2_envelope_constant(m),
        reach=m.two_over_c,
    )


def kappa_l2_upper(a: float, d_star: float, D_bar: float) -> float:
    """Closed-form bound on the per-event margin contraction factor.

    Valid for ``0 <= a < d_star`` and ``D_bar > 0``; strictly below 1, so
    each counted event shrinks the running margin geometrically.
    """
    if not (0 <= a < d_star):
        raise ValueError(f"contraction requires 0 <= a < d_star, got a={a}, d_star={d_star}")
    if not (D_bar > 0):
        raise ValueError(f"D_bar must be positive, got {D_bar}")
    return math.sqrt(max(1.0 - (d_star - a) ** 2 / (4.0 * D_bar**2), (d_star + a) / (2.0 * d_star)))


def _shrinkage_count(start: float, d_star: float, kappa: float) -> float:
    """Number of kappa-contractions taking ``start`` down to ``d_star``."""
    if start <= d_star:
        return 0.0
    return math.log(start / d_star) / math.log(1.0 / kappa)


def smm_mistake_bound(bench: Benchmark, consts: DatasetConstants) -> float:
    """Certificate on max-margin learner mistakes after initialization."""
    if bench.d_star <= 0:
        raise ValueError("benchmark margin must be positive")
    kappa = kappa_l2_upper(0.0, bench.d_star, consts.D_bar)
    return _shrinkage_count(consts.D_tilde_pm, bench.d_star, kappa)


def smm_manipulation_bounds(
    bench: Benchmark, consts: DatasetConstants, m: CostModel
) -> tuple[float, float]:
    """Certificates on negative- and positive-label manipulations.

    The positive-side certificate needs the benchmark margin to exceed the
    manipulation reach; otherwise agents may manipulate forever and the
    returned value is ``math.inf`` (rendered as "unbounded" in reports).
    """
    kappa_neg = kappa_l2_upper(0.0, bench.d_star, consts.D_bar)
    neg = _shrinkage_count(consts.D_tilde_pm, bench.d_star, kappa_neg)
    if bench.d_star > m.two_over_c:
        kappa_pos = kappa_l2_upper(m.two_over_c, bench.d_star, consts.D_bar)
        pos = _shrinkage_count(consts.D_tilde_pm, bench.d_star, kappa_pos)
    else:
        pos = math.inf
    return neg, pos


def perceptron_mistake_bound(
    bench: Benchmark,
    consts: DatasetConstants,
    m: CostModel,
    cone: ConeKind,
    tol: float = 1e-9,
) -> float:
    """Certificate on projected-perceptron mistakes for a hypothesis cone.

    The unrestricted cone pays the margin-minus-reach penalty and is
    unbounded when the reach eats the whole margin; the zero-intercept
    cone requires an (exactly) homogeneous Euclidean benchmark; the
    nonnegative-weights cone requires a nonnegative benchmark direction.
    Violated hypotheses raise :class:`HypothesisViolation`.
    """
    if bench.d_star <= 0:
        raise ValueError("benchmark margin must be positive")
    dual = dual_norm_eval(m, bench.y_star)
    if dual <= 0:
        raise ValueError("benchmark direction must be nonzero")
    tilt = (float(np.dot(bench.y_star, bench.y_star)) + bench.b_star**2) / dual**2
    energy = consts.D_tilde**2 + 1.0

    if cone is ConeKind.FULL:
        slack = bench.d_star - m.two_over_c
        if slack <= 0:
            return math.inf
        return tilt * energy / slack**2
    if cone is ConeKind.ZERO_INTERCEPT:
        if m.norm.kind != "l2":
            raise HypothesisViolation(
                "the zero-intercept certificate is only available for the l2 cost norm"
            )
        if abs(bench.b_star) > tol:
            raise HypothesisViolation(
                f"zero-intercept certificate requires b_star = 0, got {bench.b_star}"
            )
        return energy / bench.d_star**2
    if np.min(bench.y_star) < -tol:
        raise HypothesisViolation(
            "nonnegative-weights certificate requires a nonnegative benchmark direction"
        )
    return tilt * energy / bench.d_star**2
