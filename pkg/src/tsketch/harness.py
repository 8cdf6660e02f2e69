"""Experiment runner: seeded parameter sweeps with CSV output.

Each experiment expands into a deterministic work list of (problem kind,
operator variant, parameter point, trial) items.  Problem seeds depend on
(base_seed, kind, n1, n2, p, trial) only, so the same instances are reused
across operator variants and across sweep points that do not change the
problem -- a variance-reduced comparison.  Sketch seeds additionally
depend on the variant and the point, so no sketch draw is ever reused.

CSV schema (fixed):
    experiment,kind,dist,n1,n2,p,m,q,trial,seed,error_ratio,iters,converged,wall_ms

The error_ratio column carries the experiment's scalar quality metric:
the sketched-solution error ratio for the regression sweeps, the relative
recovery error for sparse-recovery (squared distance to the true signal
over a floored optimal distance; success means <= (1+eps)^2), the sup
embedding error for `embedding`, and the tail exceedance probability for
`hw-tail` (whose rows use the trial column as the threshold index).
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import log, sqrt
from statistics import median
from typing import Callable

import numpy as np

from .concentration import hanson_wright_tail, measure_sup_embedding_error, sample_unit_sphere_subspace
from .distributions import FactorDistribution, gaussian, rademacher
from .problems import (
    ProblemInstance,
    gen_ill_conditioned,
    gen_sparse_recovery,
    gen_structured,
    gen_well_conditioned,
)
from .seeds import seed64, tag
from .sketch import SketchSpec, apply, sample_sketch, sketch_matrix
from .solvers import L1SolverOptions, LsSolution, error_ratio, solve_l1_constrained, solve_unconstrained

EXPERIMENTS = (
    "sweep-m",
    "sweep-p",
    "sweep-q",
    "bounded",
    "sparse-recovery",
    "embedding",
    "hw-tail",
)
REGRESSION_KINDS = ("well", "ill", "structured")
TENSOR_DISTS = ("gr", "gg", "rr")
BASELINE_DISTS = ("dense_g", "dense_r")
IDENTITY_DIST = "identity"

CSV_COLUMNS = (
    "experiment",
    "kind",
    "dist",
    "n1",
    "n2",
    "p",
    "m",
    "q",
    "trial",
    "seed",
    "error_ratio",
    "iters",
    "converged",
    "wall_ms",
)

_KIND_CODE = {"well": 0, "ill": 1, "structured": 2, "sparse": 3}
_DIST_CODE = {"gr": 0, "gg": 1, "rr": 2, "dense_g": 3, "dense_r": 4, "identity": 5}
_T_PROBLEM = tag("problem")
_T_SKETCH = tag("sketch")
_T_TESTSET = tag("testset")

# Relative floor applied to ||x* - x_bar||^2 in the sparse-recovery metric:
# with R = ||x_bar||_1 the constrained optimum is the signal itself, so the
# raw denominator is zero and "success" degenerates to bit-exact recovery.
# The floor (1e-6 of the signal energy) makes the ratio finite while still
# demanding recovery to 1e-3 relative l2 error.
SPARSE_DENOM_FLOOR = 1e-6

DEFAULT_HW_THRESHOLDS = (0.05, 0.1, 0.15, 0.2, 0.25, 0.35, 0.5, 0.75, 1.0)


class ConfigError(ValueError):
    """Invalid experiment configuration, detected before any work runs."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep declaration.  Defaults follow the benchmark's fixed values
    (n1 = n2 = 64, p = 15, m = 400, q = 0.2, 100 trials)."""

    experiment: str
    problem_kinds: tuple[str, ...] = ("well", "ill", "structured")
    n1: int = 64
    n2: int = 64
    p: int = 15
    m: int = 400
    q: float = 0.2
    m_values: tuple[int, ...] = (50, 100, 200, 400, 800, 1600)
    p_values: tuple[int, ...] = (5, 10, 15, 20, 30)
    q_values: tuple[float, ...] = (0.05, 0.1, 0.2, 0.4, 0.6, 0.75)
    dist_pair: str = "gr"
    trials: int = 100
    base_seed: int = 0
    include_baselines: bool = True
    sparse_s: int = 5
    set_size: int = 500
    hw_thresholds: tuple[float, ...] = DEFAULT_HW_THRESHOLDS

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be non-negative")
        if self.dist_pair not in TENSOR_DISTS:
            raise ConfigError(f"dist_pair must be one of {TENSOR_DISTS}")
        if min(self.n1, self.n2) < 1:
            raise ConfigError("n1, n2 must be >= 1")
        if not 0.0 < self.q <= 1.0:
            raise ConfigError("q must lie in (0, 1]")
        for name, values in (
            ("m_values", self.m_values),
            ("p_values", self.p_values),
            ("q_values", self.q_values),
        ):
            if len(values) == 0:
                raise ConfigError(f"{name} must be nonempty")
            if any(b <= a for a, b in zip(values, values[1:])):
                raise ConfigError(f"{name} must be strictly ascending")
        for kind in self.problem_kinds:
            if kind not in REGRESSION_KINDS:
                raise ConfigError(f"unknown problem kind {kind!r}")
        if self.experiment in ("sweep-m", "sweep-q", "bounded", "embedding") and not (
            1 <= self.p <= self.n1 * self.n2
        ):
            raise ConfigError(f"infeasible size: p={self.p} > n1*n2={self.n1 * self.n2}")
        if self.experiment == "sweep-p" and max(self.p_values) > self.n1 * self.n2:
            raise ConfigError("infeasible size: max p exceeds n1*n2")
        if "structured" in self.problem_kinds and self.experiment in ("sweep-m", "sweep-q"):
            if self.p > min(self.n1, self.n2):
                raise ConfigError("structured problems need p <= min(n1, n2)")
        if "structured" in self.problem_kinds and self.experiment == "sweep-p":
            if max(self.p_values) > min(self.n1, self.n2):
                raise ConfigError("structured problems need p <= min(n1, n2)")
        if self.experiment == "sparse-recovery" and not (
            1 <= self.sparse_s <= self.n1 * self.n2
        ):
            raise ConfigError("need 1 <= sparse_s <= n1*n2")
        if self.experiment == "hw-tail":
            th = self.hw_thresholds
            if len(th) == 0 or th[0] <= 0 or any(b <= a for a, b in zip(th, th[1:])):
                raise ConfigError("hw_thresholds must be positive and ascending")


@dataclass(frozen=True)
class ResultRecord:
    """One (parameter point, trial) outcome row."""

    experiment: str
    kind: str
    dist: str
    n1: int
    n2: int
    p: int
    m: int
    q: float
    trial: int
    seed: int
    error_ratio: float
    iters: int
    converged: bool
    wall_ms: float


@dataclass(frozen=True)
class _WorkItem:
    kind: str
    dist: str
    point_index: int
    m: int
    p: int
    q: float
    trial: int


def _dist_pair_laws(name: str) -> tuple[FactorDistribution, FactorDistribution]:
    if name == "gr":
        return gaussian(), rademacher()
    if name == "gg":
        return gaussian(), gaussian()
    if name == "rr":
        return rademacher(), rademacher()
    raise ConfigError(f"not a tensor dist pair: {name!r}")


def _variants(config: ExperimentConfig) -> tuple[str, ...]:
    if config.experiment == "bounded":
        return ("gr", "gg", "rr", "dense_g", "dense_r")
    if config.experiment in ("sweep-m", "sweep-p", "sweep-q"):
        if config.include_baselines:
            return (config.dist_pair, "dense_g")
        return (config.dist_pair,)
    return (config.dist_pair,)


def _kinds(config: ExperimentConfig) -> tuple[str, ...]:
    if config.experiment == "bounded":
        return ("well",)
    if config.experiment in ("sweep-m", "sweep-p", "sweep-q"):
        return config.problem_kinds
    if config.experiment == "embedding":
        return (config.problem_kinds[0],)
    return ("sparse",) if config.experiment == "sparse-recovery" else ("well",)


def _points(config: ExperimentConfig) -> list[tuple[int, int, float]]:
    """(m, p, q) triples swept by the experiment."""
    if config.experiment in ("sweep-m", "bounded", "embedding"):
        return [(m, config.p, config.q) for m in config.m_values]
    if config.experiment == "sweep-p":
        return [(config.m, p, config.q) for p in config.p_values]
    if config.experiment == "sweep-q":
        return [(config.m, config.p, q) for q in config.q_values]
    if config.experiment == "sparse-recovery":
        return [(m, config.n1 * config.n2, config.q) for m in config.m_values]
    if config.experiment == "hw-tail":
        return [(m, config.p, config.q) for m in config.m_values]
    raise ConfigError(f"unknown experiment {config.experiment!r}")


def expected_record_count(config: ExperimentConfig) -> int:
    """Exact record count: |parameter points| x trials per point."""
    points = len(_points(config))
    if config.experiment == "hw-tail":
        # One aggregated row per (m, threshold); the config's trials are the
        # internal draws of each tail curve.
        return points * len(config.hw_thresholds)
    return points * len(_kinds(config)) * len(_variants(config)) * config.trials


def _problem_seed(config: ExperimentConfig, kind: str, n1: int, n2: int, p: int, trial: int) -> int:
    return seed64(config.base_seed, _T_PROBLEM, _KIND_CODE[kind], n1, n2, p, trial)


def _sketch_seed(config: ExperimentConfig, kind: str, dist: str, point_index: int, trial: int) -> int:
    return seed64(
        config.base_seed, _T_SKETCH, _KIND_CODE[kind], _DIST_CODE[dist], point_index, trial
    )


def _generate_problem(kind: str, n1: int, n2: int, p: int, seed: int, s: int) -> ProblemInstance:
    if kind == "well":
        return gen_well_conditioned(n1, n2, p, seed)
    if kind == "ill":
        return gen_ill_conditioned(n1, n2, p, seed)
    if kind == "structured":
        return gen_structured(n1, n2, p, seed)
    if kind == "sparse":
        return gen_sparse_recovery(n1 * n2, s, seed, n1=n1, n2=n2)
    raise ConfigError(f"unknown problem kind {kind!r}")


def _dense_operator(dist: str, m: int, n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if dist == "dense_g":
        return rng.standard_normal((m, n)) / sqrt(m)
    if dist == "dense_r":
        return (rng.integers(0, 2, size=(m, n)).astype(np.float64) * 2.0 - 1.0) / sqrt(m)
    raise ConfigError(f"not a dense baseline: {dist!r}")


def _sketch_system(
    instance: ProblemInstance, dist: str, m: int, q: float, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """(S A, S b) for the requested operator variant."""
    if dist == IDENTITY_DIST:
        return instance.A, instance.b
    if dist in BASELINE_DISTS:
        S = _dense_operator(dist, m, instance.A.shape[0], seed)
        return S @ instance.A, S @ instance.b
    d1, d2 = _dist_pair_laws(dist)
    spec = SketchSpec(m=m, n1=instance.n1, n2=instance.n2, q=q, dist1=d1, dist2=d2, seed=seed)
    sketch = sample_sketch(spec)
    SA = sketch_matrix(sketch, instance.A, instance.kron_factors)
    Sb = apply(sketch, instance.b)
    return SA, Sb


class _ProblemCache:
    """Problems and their exact solutions, shared across variants/points."""

    def __init__(self, config: ExperimentConfig):
        self._config = config
        self._cache: dict[tuple, tuple[ProblemInstance, LsSolution]] = {}

    def get(self, kind: str, p: int, trial: int) -> tuple[ProblemInstance, LsSolution]:
        config = self._config
        key = (kind, config.n1, config.n2, p, trial)
        hit = self._cache.get(key)
        if hit is None:
            seed = _problem_seed(config, kind, config.n1, config.n2, p, trial)
            instance = _generate_problem(kind, config.n1, config.n2, p, seed, config.sparse_s)
            if kind == "sparse":
                radius = float(np.abs(instance.sparse_truth[0]).sum())
                x_star = solve_l1_constrained(
                    instance.A, instance.b, L1SolverOptions(radius=radius)
                )
                # deterministic stand-in for the least-nonzeros minimizer:
                # entries below 1e-8 are treated as exact zeros
                x_sparse = np.where(np.abs(x_star.x) < 1e-8, 0.0, x_star.x)
                x_star = LsSolution(
                    x=x_sparse,
                    residual_sq=x_star.residual_sq,
                    iterations=x_star.iterations,
                    converged=x_star.converged,
                )
            else:
                x_star = solve_unconstrained(instance.A, instance.b)
            hit = (instance, x_star)
            self._cache[key] = hit
        return hit


def _run_regression_item(
    config: ExperimentConfig, cache: _ProblemCache, item: _WorkItem
) -> ResultRecord:
    instance, x_star = cache.get(item.kind, item.p, item.trial)
    sketch_seed = _sketch_seed(config, item.kind, item.dist, item.point_index, item.trial)
    t0 = time.perf_counter()
    SA, Sb = _sketch_system(instance, item.dist, item.m, item.q, sketch_seed)
    solution = solve_unconstrained(SA, Sb)
    ratio = error_ratio(instance.A, instance.b, solution.x, x_star.x)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return ResultRecord(
        experiment=config.experiment,
        kind=item.kind,
        dist=item.dist,
        n1=config.n1,
        n2=config.n2,
        p=item.p,
        m=item.m,
        q=item.q,
        trial=item.trial,
        seed=sketch_seed,
        error_ratio=ratio,
        iters=solution.iterations,
        converged=solution.converged,
        wall_ms=wall_ms,
    )


def _run_sparse_item(
    config: ExperimentConfig, cache: _ProblemCache, item: _WorkItem
) -> ResultRecord:
    instance, best = cache.get("sparse", item.p, item.trial)
    x_bar = instance.sparse_truth[0]
    radius = float(np.abs(x_bar).sum())
    opts = L1SolverOptions(radius=radius)
    sketch_seed = _sketch_seed(config, "sparse", item.dist, item.point_index, item.trial)
    t0 = time.perf_counter()
    SA, Sb = _sketch_system(instance, item.dist, item.m, item.q, sketch_seed)
    solution = solve_l1_constrained(SA, Sb, opts)
    signal_sq = float(x_bar @ x_bar)
    denom = max(float(np.sum((best.x - x_bar) ** 2)), SPARSE_DENOM_FLOOR * signal_sq)
    ratio = float(np.sum((solution.x - x_bar) ** 2)) / denom
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return ResultRecord(
        experiment=config.experiment,
        kind="sparse",
        dist=item.dist,
        n1=config.n1,
        n2=config.n2,
        p=item.p,
        m=item.m,
        q=item.q,
        trial=item.trial,
        seed=sketch_seed,
        error_ratio=ratio,
        iters=solution.iterations,
        converged=solution.converged,
        wall_ms=wall_ms,
    )


def _run_embedding_item(
    config: ExperimentConfig,
    test_set: np.ndarray,
    item: _WorkItem,
) -> ResultRecord:
    d1, d2 = _dist_pair_laws(item.dist)
    spec = SketchSpec(
        m=item.m, n1=config.n1, n2=config.n2, q=item.q, dist1=d1, dist2=d2, seed=0
    )
    sketch_seed = _sketch_seed(config, item.kind, item.dist, item.point_index, item.trial)
    t0 = time.perf_counter()
    report = measure_sup_embedding_error(spec, test_set, sketch_seed)
    wall_ms = (time.perf_counter() - t0) * 1000.0
    return ResultRecord(
        experiment=config.experiment,
        kind=item.kind,
        dist=item.dist,
        n1=config.n1,
        n2=config.n2,
        p=item.p,
        m=item.m,
        q=item.q,
        trial=item.trial,
        seed=sketch_seed,
        error_ratio=report.sup_error,
        iters=0,
        converged=True,
        wall_ms=wall_ms,
    )


def _run_hw_tail(config: ExperimentConfig) -> list[ResultRecord]:
    records = []
    thresholds = np.asarray(config.hw_thresholds, dtype=np.float64)
    for point_index, m in enumerate(config.m_values):
        seed = _sketch_seed(config, "well", config.dist_pair, point_index, 0)
        t0 = time.perf_counter()
        curve = hanson_wright_tail(
            n=config.n1,
            m=m,
            q=config.q,
            matrix_kind="identity",
            n_trials=config.trials,
            thresholds=thresholds,
            seed=seed,
        )
        wall_ms = (time.perf_counter() - t0) * 1000.0
        for t_index in range(thresholds.size):
            records.append(
                ResultRecord(
                    experiment=config.experiment,
                    kind="well",
                    dist=config.dist_pair,
                    n1=config.n1,
                    n2=config.n2,
                    p=config.p,
                    m=m,
                    q=config.q,
                    trial=t_index,
                    seed=seed,
                    error_ratio=float(curve.empirical_exceed_prob[t_index]),
                    iters=0,
                    converged=True,
                    wall_ms=wall_ms,
                )
            )
    return records


def run_experiment(
    config: ExperimentConfig,
    out_path: str | None = None,
    threads: int = 1,
) -> list[ResultRecord]:
    """Run every (point, trial) of ``config``; optionally write the CSV.

    Records come back in deterministic (kind, variant, point, trial)
    order regardless of the thread count.
    """
    if config.experiment == "hw-tail":
        records = _run_hw_tail(config)
        if out_path is not None:
            write_csv(records, out_path)
        return records

    cache = _ProblemCache(config)
    items = [
        _WorkItem(kind=kind, dist=dist, point_index=i, m=m, p=p, q=q, trial=trial)
        for kind in _kinds(config)
        for dist in _variants(config)
        for i, (m, p, q) in enumerate(_points(config))
        for trial in range(config.trials)
    ]

    if config.experiment == "sparse-recovery":
        runner: Callable[[_WorkItem], ResultRecord] = lambda it: _run_sparse_item(config, cache, it)
    elif config.experiment == "embedding":
        instance, _ = cache.get(_kinds(config)[0], config.p, 0)
        test_set = sample_unit_sphere_subspace(
            instance.A, config.set_size, seed64(config.base_seed, _T_TESTSET)
        )
        runner = lambda it: _run_embedding_item(config, test_set, it)
    else:
        runner = lambda it: _run_regression_item(config, cache, it)

    if threads <= 1:
        records = [runner(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(runner, items))
    if out_path is not None:
        write_csv(records, out_path)
    return records


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def csv_text(records: list[ResultRecord]) -> str:
    """Render records under the fixed schema (shortest round-trip floats)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for rec in records:
        writer.writerow([_format_value(getattr(rec, col)) for col in CSV_COLUMNS])
    return buf.getvalue()


def write_csv(records: list[ResultRecord], path: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(csv_text(records))


def aggregate_mean(records: list[ResultRecord], group_keys: tuple[str, ...]) -> list[dict]:
    """Mean/median/count of error_ratio per group, groups in first-seen order."""
    if not records:
        raise ValueError("no records to aggregate")
    if not group_keys:
        raise ValueError("need at least one group key")
    groups: dict[tuple, list[float]] = {}
    for rec in records:
        key = tuple(getattr(rec, k) for k in group_keys)
        groups.setdefault(key, []).append(rec.error_ratio)
    rows = []
    for key, values in groups.items():
        row = dict(zip(group_keys, key))
        row["mean"] = sum(values) / len(values)
        row["median"] = median(values)
        row["count"] = len(values)
        rows.append(row)
    return rows


def fit_loglog_slope(
    rows: list[dict],
    x_field: str,
    x_range: tuple[float, float] | None = None,
    y_field: str = "mean",
) -> tuple[float, float]:
    """OLS slope and intercept of log(y) against log(x).

    Only rows with positive x and y (and x within ``x_range`` when given)
    participate; fewer than two usable points is an error.
    """
    pts = []
    for row in rows:
        x, y = float(row[x_field]), float(row[y_field])
        if x <= 0 or y <= 0:
            continue
        if x_range is not None and not (x_range[0] <= x <= x_range[1]):
            continue
        pts.append((log(x), log(y)))
    if len(pts) < 2:
        raise ValueError("need at least two usable points for a slope fit")
    xs = np.array([p[0] for p in pts])
    ys = np.array([p[1] for p in pts])
    slope, intercept = np.polyfit(xs, ys, 1)
    return float(slope), float(intercept)
