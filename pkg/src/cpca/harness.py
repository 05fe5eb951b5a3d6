"""Experiment driver: objective families, a brute-force oracle, metric sweeps."""

from __future__ import annotations

import csv
import enum
import json
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .algorithm import Backend, CpcaConfig, run_cpca
from .chebfit import Interval
from .errors import CpcaError
from .netgraph import Graph, diameter, erdos_renyi_connected

CSV_HEADER = ["eps", "seed", "rounds", "queries", "degree", "abs_error", "runtime_ms", "status"]
DOMAIN = Interval(-1.0, 1.0)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


class Family(enum.Enum):
    EXPSUM = "expsum"
    LOGISTICLOG = "logisticlog"
    CUSTOM = "custom"


@dataclass(frozen=True)
class ExpSum:
    """``a exp(b x) + c exp(-d x)``."""

    a: float
    b: float
    c: float
    d: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a * np.exp(self.b * x) + self.c * np.exp(-self.d * x)


@dataclass(frozen=True)
class LogisticLog:
    """``a / (1 + exp(-x)) + b log(1 + x^2)``."""

    a: float
    b: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.a / (1.0 + np.exp(-x)) + self.b * np.log1p(x * x)


@dataclass(frozen=True)
class Average:
    """Pointwise mean of several objectives."""

    parts: tuple

    def __call__(self, x):
        return sum(f(x) for f in self.parts) / len(self.parts)


def objective_rng(seed: int, agent_index: int) -> np.random.Generator:
    return np.random.default_rng([seed, agent_index])


def sample_objective(family, seed: int, agent_index: int):
    """Draw agent ``agent_index``'s objective for experiment ``seed``.

    ExpSum draws ``a, b ~ U(1, 2)`` then ``c, d ~ U(2, 4)``; LogisticLog
    draws ``a ~ N(10, 2)`` and ``b ~ N(5, 1)`` (second parameter is the
    variance), both from ``default_rng([seed, agent_index])``.
    """
    family = Family(family)
    rng = objective_rng(seed, agent_index)
    if family is Family.EXPSUM:
        a, b = rng.uniform(1.0, 2.0, size=2)
        c, d = rng.uniform(2.0, 4.0, size=2)
        return ExpSum(float(a), float(b), float(c), float(d))
    if family is Family.LOGISTICLOG:
        a = rng.normal(10.0, math.sqrt(2.0))
        b = rng.normal(5.0, 1.0)
        return LogisticLog(float(a), float(b))
    raise ValueError("custom objectives are supplied by the caller, not sampled")


def golden_section(f: Callable, lo: float, hi: float, tol: float = 1e-12) -> tuple[float, float]:
    """Minimize a unimodal ``f`` on ``[lo, hi]``; returns ``(value, point)``."""
    a, b = lo, hi
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = float(f(c)), float(f(d))
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = float(f(c))
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = float(f(d))
    x = 0.5 * (a + b)
    return float(f(x)), float(x)


def brute_force_min(f: Callable, iv: Interval = DOMAIN, n: int = 10**6, n_refine: int = 5) -> tuple[float, float]:
    """Global minimum of ``f`` on ``iv`` by dense sampling plus golden-section polishing.

    Samples ``n + 1`` uniform points, then refines the ``n_refine`` best
    local minima of the samples inside their neighboring cells.
    """
    x = np.linspace(iv.lo, iv.hi, n + 1)
    v = np.asarray(f(x), dtype=float)
    interior = np.nonzero((v[1:-1] <= v[:-2]) & (v[1:-1] <= v[2:]))[0] + 1
    cand = np.concatenate(([0, n], interior))
    cand = cand[np.argsort(v[cand], kind="stable")][: n_refine + 2]
    k = int(np.argmin(v))
    best = (float(v[k]), float(x[k]))
    for k in cand:
        lo, hi = x[max(k - 1, 0)], x[min(k + 1, n)]
        val, pt = golden_section(f, lo, hi)
        if val < best[0]:
            best = (val, pt)
    return best


@dataclass
class ExperimentSpec:
    family: Family = Family.EXPSUM
    n_agents: int = 30
    edge_prob: float = 0.4
    seeds: list = field(default_factory=lambda: [42])
    eps_list: list = field(default_factory=lambda: [1e-4])
    backend: Backend = Backend.STATIONARY
    U_policy: str | int = "exact"  # "exact" or a fixed integer bound

    def __post_init__(self):
        self.family = Family(self.family)
        self.backend = Backend(self.backend)
        if self.n_agents < 1:
            raise ValueError("n_agents must be at least 1")
        if any(e <= 0 for e in self.eps_list):
            raise ValueError("eps_list entries must be positive")
        if self.U_policy != "exact" and not (isinstance(self.U_policy, int) and self.U_policy >= 1):
            raise ValueError("U_policy must be 'exact' or a positive integer")

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        raw = json.loads(Path(path).read_text())
        policy = raw.pop("U_policy", "exact")
        if isinstance(policy, dict):
            policy = int(policy["fixed"])
        return cls(U_policy=policy, **raw)


@dataclass
class MetricsRecord:
    eps: float
    seed: int
    rounds: int
    queries: int
    degree: int
    abs_error: float
    runtime_ms: int
    status: str = "ok"


def build_graph(n_agents: int, edge_prob: float, seed: int) -> Graph:
    if n_agents == 1:
        return Graph(1, frozenset())
    return erdos_renyi_connected(n_agents, edge_prob, seed)


def run_sweep(
    spec: ExperimentSpec,
    output=None,
    objective_factory: Callable | None = None,
) -> list[MetricsRecord]:
    """Run CPCA for every ``(eps, seed)`` pair and score it against the oracle.

    Failed runs are recorded with a non-``ok`` status and the sweep goes on.
    ``objective_factory(seed, agent_index)`` supplies objectives for the
    custom family.
    """
    if spec.family is Family.CUSTOM and objective_factory is None:
        raise ValueError("custom family needs an objective_factory")
    make = objective_factory or (lambda seed, i: sample_objective(spec.family, seed, i))
    records = []
    for seed in spec.seeds:
        g = build_graph(spec.n_agents, spec.edge_prob, seed)
        U = max(1, diameter(g)) if spec.U_policy == "exact" else int(spec.U_policy)
        objectives = [make(seed, i) for i in range(spec.n_agents)]
        f_star, _ = brute_force_min(Average(tuple(objectives)))
        for eps in spec.eps_list:
            cfg = CpcaConfig(eps=eps, backend=spec.backend, U=U)
            start = time.perf_counter()
            try:
                res = run_cpca(objectives, [DOMAIN] * spec.n_agents, g, cfg)
            except CpcaError as exc:
                ms = int(round(1000 * (time.perf_counter() - start)))
                status = f"{type(exc).__name__}@{exc.stage}"
                records.append(MetricsRecord(eps, seed, -1, -1, -1, math.nan, ms, status))
                continue
            ms = int(round(1000 * (time.perf_counter() - start)))
            records.append(
                MetricsRecord(
                    eps=eps,
                    seed=seed,
                    rounds=res.metrics.consensus_rounds,
                    queries=max(res.metrics.queries_per_agent),
                    degree=res.metrics.max_proxy_degree,
                    abs_error=float(np.max(np.abs(res.f_e_star - f_star))),
                    runtime_ms=ms,
                )
            )
    records.sort(key=lambda r: (r.eps, r.seed))
    if output is not None:
        write_metrics_csv(records, output)
    return records


def write_metrics_csv(records, path) -> None:
    """Write records to ``path`` (a filename or an open text stream)."""
    if hasattr(path, "write"):
        _write_rows(records, path)
        return
    with open(path, "w", newline="") as fh:
        _write_rows(records, fh)


def _write_rows(records, fh) -> None:
    w = csv.writer(fh)
    w.writerow(CSV_HEADER)
    for r in records:
        row = asdict(r)
        row["eps"] = repr(float(r.eps))
        row["abs_error"] = repr(float(r.abs_error))
        w.writerow([row[k] for k in CSV_HEADER])
