"""Experiment harness: config files, online runs, metrics, certification.

A run config is a flat ``key = value`` text file.  ``run_online`` replays
a dataset through one learner and records per-iteration metrics;
``certify`` compares recorded counts against the mistake/manipulation
certificates; ``reproduce_example`` re-derives the four canonical
micro-instances and checks their published numbers.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .bounds import (
    Benchmark,
    HypothesisViolation,
    dataset_constants,
    perceptron_mistake_bound,
    smm_manipulation_bounds,
    smm_mistake_bound,
)
from .data import Dataset, SynthConfig, generate_synthetic, load_csv, trim_margin
from .learners import (
    ConeKind,
    GradSmmLearner,
    PerceptronLearner,
    SmmLearner,
)
from .maxmargin import margin_h, solve_max_margin
from .norms import CostModel, parse_norm
from .response import Agent, interact

_D_MONOTONE_TOL = 1e-8

ALGORITHMS = ("smm", "gradsmm", "perceptron")
MODES = ("iid", "stream")
TRACK_LEVELS = ("counts", "distance", "full")


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configuration."""


@dataclass
class RunConfig:
    algorithm: str = "smm"
    norm: str = "l2"
    c: float | None = None
    T: int | None = None
    seed: int = 0
    mode: str = "iid"
    rounds: int = 1
    sigma: float = 0.0
    cone: str = "full"
    gamma: float = 1.0
    schedule: str = "invsqrt"
    tol: float | None = None
    force_resolve: bool = False
    dataset: str = "synthetic"
    synth_seed: int = 0
    synth_n: int = 2000
    synth_d: int = 6
    synth_rho: float = 0.02
    synth_radius: float = 1.0 / math.sqrt(5.0)
    synth_variance: float = 0.04
    trim_rho: float | None = None
    track: str = "full"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.track not in TRACK_LEVELS:
            raise ConfigError(f"track must be one of {TRACK_LEVELS}, got {self.track!r}")
        if self.c is None:
            raise ConfigError("manipulation budget missing: set c or two_over_c")
        if self.c <= 0:
            raise ConfigError("c must be positive")
        if self.T is not None and self.T < 1:
            raise ConfigError("T must be >= 1")
        if self.rounds < 1:
            raise ConfigError("rounds must be >= 1")
        if self.sigma < 0:
            raise ConfigError("sigma must be >= 0")
        if self.tol is not None and self.tol <= 0:
            raise ConfigError("tol must be positive")
        ConeKind(self.cone)  # validates
        parse_norm(self.norm)  # validates

    @property
    def solve_tol(self) -> float:
        """Margin-solver certificate tolerance for this run.

        Defaults to 1e-10, loosened to 1e-6 under response noise: noisy
        pools stack support points that are coplanar only to about the
        noise-induced drift of the decision boundary, and no double
        precision certificate can split such a face at 1e-10.  An
        explicit ``tol`` always wins.
        """
        if self.tol is not None:
            return self.tol
        return 1e-10 if self.sigma == 0.0 else 1e-6


_BOOL_KEYS = {"force_resolve"}
_INT_KEYS = {"T", "seed", "rounds", "synth_seed", "synth_n", "synth_d"}
_FLOAT_KEYS = {
    "c",
    "sigma",
    "gamma",
    "tol",
    "synth_rho",
    "synth_radius",
    "synth_variance",
    "trim_rho",
}


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines (#-comments allowed) into a RunConfig."""
    known = {f.name for f in fields(RunConfig)}
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key == "two_over_c":
            key = "c"
            val = str(2.0 / float(val))
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _BOOL_KEYS:
                if val.lower() not in ("true", "false", "1", "0"):
                    raise ValueError(f"not a boolean: {val!r}")
                values[key] = val.lower() in ("true", "1")
            elif key in _INT_KEYS:
                values[key] = int(val)
            elif key in _FLOAT_KEYS:
                values[key] = float(val)
            else:
                values[key] = val
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    return RunConfig(**values)


def read_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


def build_dataset(cfg: RunConfig) -> Dataset:
    """Materialize the dataset a config refers to, applying any trim."""
    if cfg.dataset == "synthetic":
        ds = generate_synthetic(
            SynthConfig(
                seed=cfg.synth_seed,
                n=cfg.synth_n,
                d=cfg.synth_d,
                rho=cfg.synth_rho,
                radius=cfg.synth_radius,
                variance=cfg.synth_variance,
            )
        )
    else:
        ds = load_csv(cfg.dataset)
    if cfg.trim_rho is not None:
        model = CostModel(parse_norm(cfg.norm), cfg.c, ds.dim)
        ds = trim_margin(ds, cfg.trim_rho, model)
    return ds


# ---------------------------------------------------------------------------
# Metrics


_CSV_HEADER = ["t", "mistake", "manipulated", "label", "d_t", "distance", "margin_gap"]


@dataclass
class RunMetrics:
    """Per-iteration record of one online run plus end-of-run summary."""

    t: list = field(default_factory=list)
    mistake: list = field(default_factory=list)
    manipulated: list = field(default_factory=list)
    label: list = field(default_factory=list)
    d_t: list = field(default_factory=list)
    distance: list = field(default_factory=list)
    margin_gap: list = field(default_factory=list)
    init_steps: int = 0
    init_mistakes: int = 0
    solve_count: int = 0
    inseparable_at: int | None = None
    wall_time: float = 0.0
    final_y: np.ndarray | None = None
    final_b: float | None = None

    @property
    def mistakes(self) -> int:
        return sum(self.mistake)

    @property
    def manipulations(self) -> int:
        return sum(self.manipulated)

    def manipulations_by_label(self, sign: int) -> int:
        return sum(m for m, l in zip(self.manipulated, self.label) if m and l == sign)

    @property
    def final_distance(self) -> float | None:
        for v in reversed(self.distance):
            if v is not None:
                return v
        return None

    def summary(self) -> str:
        parts = [
            f"T={len(self.t)}",
            f"mistakes={self.mistakes}",
            f"manipulations={self.manipulations}",
            f"init_steps={self.init_steps}",
        ]
        if self.solve_count:
            parts.append(f"solves={self.solve_count}")
        if self.final_distance is not None:
            parts.append(f"final_distance={self.final_distance:.6g}")
        parts.append(f"wall={self.wall_time:.2f}s")
        return " ".join(parts)


def _fmt(v) -> str:
    if v is None:
        return ""
    return f"{v:.17g}"


def write_metrics(metrics: RunMetrics, path) -> None:
    """Write the per-iteration table as CSV: one header row plus one row per t."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(",".join(_CSV_HEADER) + "\n")
        for i in range(len(metrics.t)):
            row = [
                str(metrics.t[i]),
                str(int(metrics.mistake[i])),
                str(int(metrics.manipulated[i])),
                str(metrics.label[i]),
                _fmt(metrics.d_t[i]),
                _fmt(metrics.distance[i]),
                _fmt(metrics.margin_gap[i]),
            ]
            fh.write(",".join(row) + "\n")


def read_metrics(path) -> RunMetrics:
    """Read a metrics CSV back; summary counters are left at defaults."""
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines or lines[0].split(",") != _CSV_HEADER:
        raise ValueError(f"{path}: missing or unexpected header")
    out = RunMetrics()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(_CSV_HEADER):
            raise ValueError(f"{path}:{lineno}: expected {len(_CSV_HEADER)} fields")
        out.t.append(int(parts[0]))
        out.mistake.append(bool(int(parts[1])))
        out.manipulated.append(bool(int(parts[2])))
        out.label.append(int(parts[3]))
        out.d_t.append(float(parts[4]) if parts[4] else None)
        out.distance.append(float(parts[5]) if parts[5] else None)
        out.margin_gap.append(float(parts[6]) if parts[6] else None)
    return out


# ---------------------------------------------------------------------------
# Online runs


def _build_learner(cfg: RunConfig, model: CostModel):
    if cfg.algorithm == "smm":
        return SmmLearner(model, solver_tol=cfg.solve_tol, force_resolve=cfg.force_resolve)
    if cfg.algorithm == "gradsmm":
        return GradSmmLearner(model, schedule=cfg.schedule, solver_tol=cfg.solve_tol)
    return PerceptronLearner(model, cone=ConeKind(cfg.cone), gamma=cfg.gamma)


def _arrival_indices(cfg: RunConfig, n: int, rng) -> np.ndarray:
    if cfg.mode == "iid":
        if cfg.T is None:
            raise ConfigError("iid mode requires an explicit T")
        return rng.integers(0, n, size=cfg.T)
    order = rng.permutation(n)
    seq = np.tile(order, cfg.rounds)
    T = cfg.T if cfg.T is not None else len(seq)
    if T > len(seq):
        raise ConfigError(f"T={T} exceeds rounds*n={len(seq)} in stream mode")
    return seq[:T]


def _normalized_distance(y, b, bench: Benchmark) -> float | None:
    ny = float(np.linalg.norm(y))
    if ny == 0.0:
        return None
    nstar = float(np.linalg.norm(bench.y_star))
    diff_y = y / ny - bench.y_star / nstar
    diff_b = b / ny - bench.b_star / nstar
    return float(math.hypot(np.linalg.norm(diff_y), diff_b))


def run_online(cfg: RunConfig, dataset: Dataset | None = None) -> RunMetrics:
    """Stream the dataset through the configured learner and record metrics."""
    if dataset is None:
        dataset = build_dataset(cfg)
    model = CostModel(parse_norm(cfg.norm), cfg.c, dataset.dim)
    arrival_rng, noise_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(2)
    )
    idx = _arrival_indices(cfg, dataset.n, arrival_rng)
    learner = _build_learner(cfg, model)
    bench = dataset.benchmark
    want_distance = cfg.track in ("distance", "full") and bench is not None
    want_gap = cfg.track == "full" and bench is not None
    if want_gap:
        pair = dataset.point_sets()
        h_star = margin_h(bench.y_star, bench.b_star, pair)

    metrics = RunMetrics()
    start = time.perf_counter()
    for step, i in enumerate(idx, start=1):
        clf = learner.declare()
        in_init = learner.in_init
        agent = Agent(dataset.features[i], int(dataset.labels[i]))
        inter = interact(agent, clf, model, sigma=cfg.sigma, noise_rng=noise_rng)

        metrics.t.append(step)
        metrics.mistake.append(inter.mistake)
        metrics.manipulated.append(inter.manipulated)
        metrics.label.append(agent.label)
        d_now = None
        if isinstance(learner, SmmLearner) and not in_init and learner.solution is not None:
            d_now = learner.solution.d
        metrics.d_t.append(d_now)
        metrics.distance.append(
            _normalized_distance(clf.y, clf.b, bench) if want_distance else None
        )
        metrics.margin_gap.append(
            h_star - margin_h(clf.y, clf.b, pair) if want_gap else None
        )
        if in_init:
            metrics.init_steps += 1
            if inter.mistake:
                metrics.init_mistakes += 1

        learner.update(inter.response, agent.label)

    metrics.wall_time = time.perf_counter() - start
    final = learner.declare()
    metrics.final_y = final.y
    metrics.final_b = final.b
    metrics.solve_count = getattr(learner, "solve_count", 0)
    metrics.inseparable_at = getattr(learner, "inseparable_at", None)
    return metrics


# ---------------------------------------------------------------------------
# Certification


@dataclass
class CertRow:
    name: str
    bound: float | None
    observed: float | None
    status: str  # pass | fail | unbounded | not applicable | info

    def render(self) -> str:
        def num(v):
            if v is None:
                return "-"
            if v == math.inf:
                return "unbounded"
            if isinstance(v, float) and v.is_integer() and abs(v) < 1e15:
                return str(int(v))
            return f"{v:.6g}"

        return f"{self.name:<42} bound={num(self.bound):>12} observed={num(self.observed):>10} [{self.status}]"


@dataclass
class CertifyReport:
    rows: list
    preamble: list

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.rows)

    def render(self) -> str:
        lines = list(self.preamble)
        lines.extend(r.render() for r in self.rows)
        lines.append("RESULT: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _init_consumption(labels_in_order: np.ndarray) -> int:
    """Iterations the declaration phase consumes: until both labels appeared."""
    seen_pos = seen_neg = False
    for k, lbl in enumerate(labels_in_order, start=1):
        seen_pos = seen_pos or lbl == 1
        seen_neg = seen_neg or lbl == -1
        if seen_pos and seen_neg:
            return k
    return len(labels_in_order)


def certify(
    cfg: RunConfig, metrics: RunMetrics | None = None, dataset: Dataset | None = None
) -> CertifyReport:
    """Compare observed counts against the applicable certificates."""
    if dataset is None:
        dataset = build_dataset(cfg)
    model = CostModel(parse_norm(cfg.norm), cfg.c, dataset.dim)
    bench = dataset.benchmark
    if bench is None:
        sol = solve_max_margin(dataset.point_sets(), model)
        if not sol.separable:
            raise ConfigError("cannot certify: dataset is not separable")
        bench = Benchmark(sol.y, sol.b, sol.d)
    consts = dataset_constants(dataset.features, dataset.labels, model)

    preamble = [
        f"algorithm={cfg.algorithm} norm={cfg.norm} c={cfg.c:g} (budget 2/c={model.two_over_c:g})",
        f"d_star={bench.d_star:.6g} D_tilde={consts.D_tilde:.6g} D_bar={consts.D_bar:.6g}",
    ]

    init_steps = init_mistakes = None
    if metrics is not None:
        if cfg.algorithm in ("smm", "gradsmm"):
            arrival_rng, _ = (
                np.random.default_rng(s) for s in np.random.SeedSequence(cfg.seed).spawn(2)
            )
            idx = _arrival_indices(cfg, dataset.n, arrival_rng)
            k = _init_consumption(dataset.labels[idx])
            init_steps = min(k, len(metrics.t))
            init_mistakes = sum(metrics.mistake[:init_steps])
        else:
            init_steps, init_mistakes = 0, 0

    def row(name, bound, observed):
        if bound is not None and bound == math.inf:
            return CertRow(name, math.inf, observed, "unbounded")
        if observed is None:
            return CertRow(name, bound, None, "info")
        status = "pass" if observed <= bound else "fail"
        return CertRow(name, bound, observed, status)

    rows = []
    if cfg.algorithm == "smm":
        mist_bound = smm_mistake_bound(bench, consts)
        neg_bound, pos_bound = smm_manipulation_bounds(bench, consts, model)
        obs_mist = None if metrics is None else metrics.mistakes - init_mistakes
        rows.append(row("mistakes after declaration", mist_bound, obs_mist))
        rows.append(
            row(
                "manipulations, negative agents",
                neg_bound,
                None if metrics is None else metrics.manipulations_by_label(-1),
            )
        )
        rows.append(
            row(
                "manipulations, positive agents",
                pos_bound,
                None if metrics is None else metrics.manipulations_by_label(1),
            )
        )
        rows.append(
            row("declaration-phase mistakes", 2.0, None if metrics is None else init_mistakes)
        )
        if metrics is not None:
            ds = [v for v in metrics.d_t if v is not None]
            mono = all(b <= a + _D_MONOTONE_TOL for a, b in zip(ds, ds[1:]))
            above = all(v >= bench.d_star - _D_MONOTONE_TOL for v in ds)
            ok = mono and above
            rows.append(
                CertRow(
                    "margins nonincreasing and >= d_star",
                    None,
                    None,
                    "pass" if ok else "fail",
                )
            )
    elif cfg.algorithm == "gradsmm":
        rows.append(
            row("declaration-phase mistakes", 2.0, None if metrics is None else init_mistakes)
        )
        rows.append(
            CertRow(
                "mistakes (no finite certificate for averaged iterates)",
                None,
                None if metrics is None else metrics.mistakes,
                "info",
            )
        )
    else:
        cone = ConeKind(cfg.cone)
        try:
            bound = perceptron_mistake_bound(bench, consts, model, cone)
        except HypothesisViolation as exc:
            rows.append(CertRow(f"mistakes ({cone.value} cone): {exc}", None, None, "not applicable"))
        else:
            rows.append(
                row(
                    f"mistakes ({cone.value} cone)",
                    bound,
                    None if metrics is None else metrics.mistakes,
                )
            )
    return CertifyReport(rows, preamble)


# ---------------------------------------------------------------------------
# Worked examples


@dataclass
class ExampleReport:
    name: str
    passed: bool
    lines: list

    def render(self) -> str:
        body = "\n".join(self.lines)
        verdict = "PASS" if self.passed else "FAIL"
        return f"example {self.name}\n{body}\n{verdict}"


class _Checks:
    def __init__(self):
        self.lines = []
        self.passed = True

    def check(self, cond: bool, msg: str):
        self.lines.append(("ok: " if cond else "FAIL: ") + msg)
        self.passed = self.passed and bool(cond)

    def close(self, actual, expected, tol: float, msg: str):
        err = float(np.max(np.abs(np.asarray(actual, dtype=float) - np.asarray(expected, dtype=float))))
        self.check(err <= tol, f"{msg} (err={err:.3g}, tol={tol:g})")


def _example_truthful_max_margin() -> ExampleReport:
    from .maxmargin import PointSetPair
    from .response import Classifier, interact, respond

    chk = _Checks()
    pos = np.array([[-1.0, 1.0], [0.0, 1.0], [1.0, 1.0], [2.0, 1.0]])
    neg = np.array([[-1.0, -1.0], [1.0, -1.0]])
    model = CostModel(parse_norm("l2"), c=4.0, dim=2)
    sol = solve_max_margin(PointSetPair.from_arrays(pos, neg), model)
    chk.close(sol.y, [0.0, 1.0], 1e-9, "max-margin direction is (0, 1)")
    chk.close([sol.b], [0.0], 1e-9, "max-margin intercept is 0")
    chk.close([sol.d], [1.0], 1e-9, "margin equals 1")

    star = Classifier(sol.y, sol.b)
    truthful = True
    correct = True
    for X, lbl in ((pos, 1), (neg, -1)):
        for x in X:
            it = interact(Agent(x, lbl), star, model)
            truthful = truthful and not it.manipulated
            correct = correct and not it.mistake
    chk.check(truthful, "no agent manipulates against the max-margin classifier")
    chk.check(correct, "no mistakes under the max-margin classifier")

    bad = Classifier(np.array([1.0, 2.0]), 0.0)
    r = respond(Agent(np.array([-1.0, 1.0]), 1), bad, model)
    expected = [-6.0 / 5.0 + math.sqrt(5.0) / 10.0, 3.0 / 5.0 + math.sqrt(5.0) / 5.0]
    chk.close(r, expected, 1e-12, "agent (-1,1) moves onto the indifference boundary of (1,2)")
    return ExampleReport("truthful-max-margin", chk.passed, chk.lines)


def _example_smm_stuck() -> ExampleReport:
    chk = _Checks()
    model = CostModel(parse_norm("l2"), c=math.sqrt(2.0), dim=2)
    learner = SmmLearner(model)
    stream = [(np.array([0.0, 1.0]), 1), (np.array([-2.0, -1.0]), -1)]
    stream += [(np.array([-2.0, 1.0]), 1)] * 498

    mistakes = manips = 0
    for x, lbl in stream:
        clf = learner.declare()
        it = interact(Agent(x, lbl), clf, model)
        mistakes += it.mistake
        manips += it.manipulated
        learner.update(it.response, lbl)

    s2 = math.sqrt(2.0)
    final = learner.declare()
    chk.close(final.y, [1.0 / s2, 1.0 / s2], 1e-9, "direction stuck at (1,1)/sqrt(2)")
    chk.close([final.b], [1.0 / s2], 1e-9, "intercept stuck at 1/sqrt(2)")
    chk.close([learner.solution.d], [s2], 1e-9, "pool margin stuck at sqrt(2)")
    chk.check(learner.solve_count == 1, f"no re-solve after declaration (solves={learner.solve_count})")
    chk.check(manips == 498, f"agent (-2,1) manipulated on all 498 visits (got {manips})")
    chk.check(mistakes <= 2, f"no mistakes beyond the declaration phase (got {mistakes})")

    r = learner.pool.positives[-1]
    chk.close(r, [-1.0, 2.0], 1e-12, "manipulated response lands at (-1, 2)")

    truth = PointSetPairFromExample2()
    sol = solve_max_margin(truth, model)
    chk.close([sol.d], [1.0], 1e-9, "true max margin over the population is 1")
    return ExampleReport("smm-stuck", chk.passed, chk.lines)


def PointSetPairFromExample2():
    from .maxmargin import PointSetPair

    pos = np.array([[0.0, 1.0], [-2.0, 1.0]])
    neg = np.array([[-2.0, -1.0]])
    return PointSetPair.from_arrays(pos, neg)


def _example_perceptron_margin() -> ExampleReport:
    chk = _Checks()
    model = CostModel(parse_norm("l2"), c=4.0, dim=2)
    learner = PerceptronLearner(model, cone=ConeKind.FULL, gamma=1.0)

    first = [(np.array([1.0, -1.0]), -1), (np.array([2.0, 1.0]), 1)]
    cycle = [
        (np.array([-1.0, 1.0]), 1),
        (np.array([0.0, 1.0]), 1),
        (np.array([1.0, 1.0]), 1),
        (np.array([2.0, 1.0]), 1),
        (np.array([-1.0, -1.0]), -1),
        (np.array([1.0, -1.0]), -1),
    ]

    def play(x, lbl):
        it = interact(Agent(x, lbl), learner.declare(), model)
        learner.update(it.response, lbl)
        return it

    play(*first[0])
    q1 = learner.declare()
    chk.close(q1.y, [-1.0, 1.0], 0.0, "first update lands on (-1, 1)")
    chk.close([q1.b], [-1.0], 0.0, "first intercept is -1")
    play(*first[1])
    q2 = learner.declare()
    chk.close(q2.y, [1.0, 2.0], 0.0, "second update lands on (1, 2)")
    chk.close([q2.b], [0.0], 0.0, "second intercept is 0")

    manips = 0
    for _ in range(500):
        for x, lbl in cycle:
            it = play(x, lbl)
            if np.array_equal(x, [-1.0, 1.0]):
                manips += it.manipulated
            else:
                chk_truthful = not it.manipulated
                if not chk_truthful:
                    chk.check(False, f"unexpected manipulation at {x}")
    chk.check(learner.mistakes == 2, f"no updates after t=2 (mistakes={learner.mistakes})")
    chk.check(manips == 500, f"agent (-1,1) manipulates on every visit (got {manips})")

    final = learner.declare()
    dist = _normalized_distance(final.y, final.b, Benchmark(np.array([0.0, 1.0]), 0.0, 1.0))
    chk.check(dist is not None and dist > 0.3, f"frozen classifier stays far from max margin (dist={dist:.3f})")

    nn = PerceptronLearner(model, cone=ConeKind.NONNEG_WEIGHTS, gamma=1.0)
    it = interact(Agent(*first[0]), nn.declare(), model)
    nn.update(it.response, first[0][1])
    q = nn.declare()
    chk.close(q.y, [0.0, 1.0], 0.0, "nonneg cone clips the first update to (0, 1)")
    chk.close([q.b], [-1.0], 0.0, "nonneg cone keeps intercept -1")
    return ExampleReport("perceptron-margin", chk.passed, chk.lines)


def _example_l1_counterexample() -> ExampleReport:
    chk = _Checks()
    model = CostModel(parse_norm("l1"), c=2.0, dim=2)
    learner = PerceptronLearner(model, cone=ConeKind.ZERO_INTERCEPT, gamma=1.0)
    z = np.array([0.75, 0.25])
    probe = np.array([1.0, 0.0])  # the budget point 2w/c for w = e1

    it = interact(Agent(-z, -1), learner.declare(), model)
    learner.update(it.response, -1)
    q = learner.declare()
    chk.close(q.y, z, 0.0, "first update recovers z exactly")
    chk.close([q.b], [0.0], 0.0, "zero-intercept cone pins b = 0")

    mistakes = 0
    drifted = False
    for _ in range(500):
        it = interact(Agent(probe, -1), learner.declare(), model)
        mistakes += it.mistake
        learner.update(it.response, -1)
        drifted = drifted or not np.array_equal(learner.declare().y, z)
    chk.check(mistakes == 500, f"budget point costs a mistake on every visit (got {mistakes})")
    chk.check(not drifted, "classifier direction never moves off z")
    chk.close([float(np.linalg.norm(it.proxy))], [0.0], 1e-12, "proxy collapses to the origin")
    return ExampleReport("l1-counterexample", chk.passed, chk.lines)


_EXAMPLES = {
    "truthful-max-margin": _example_truthful_max_margin,
    "smm-stuck": _example_smm_stuck,
    "perceptron-margin": _example_perceptron_margin,
    "l1-counterexample": _example_l1_counterexample,
}

EXAMPLE_NAMES = tuple(_EXAMPLES)


def reproduce_example(name: str) -> ExampleReport:
    """Re-run one of the canonical micro-instances and verify its numbers."""
    try:
        fn = _EXAMPLES[name]
    except KeyError:
        raise ConfigError(
            f"unknown example {name!r}; choose from {', '.join(_EXAMPLES)}"
        ) from None
    return fn()


# ---------------------------------------------------------------------------
# Sweeps


def sweep(config_dir, out_dir=None) -> list:
    """Run every ``*.cfg`` config in a directory; write metrics CSVs beside them."""
    config_dir = Path(config_dir)
    paths = sorted(config_dir.glob("*.cfg"))
    if not paths:
        raise ConfigError(f"no *.cfg files in {config_dir}")
    out_dir = Path(out_dir) if out_dir is not None else config_dir
    results = []
    for path in paths:
        cfg = read_config(path)
        metrics = run_online(cfg)
        out_path = out_dir / (path.stem + ".metrics.csv")
        write_metrics(metrics, out_path)
        results.append((path.name, metrics, out_path))
    return results
