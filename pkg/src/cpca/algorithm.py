"""End-to-end CPCA: local proxies, consensus on coefficients, local minimization.

Every agent fits a Chebyshev proxy to its own objective on the common
feasible interval, the coefficient vectors are averaged by consensus until
the distributed stopping test fires, and each agent then minimizes the
proxy it ended up with. With the error budget ``eps1 + eps2 + eps3 = eps``
every agent's value is within ``eps`` of the global optimum.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .chebfit import DEFAULT_M_MAX, ApproxReport, ChebProxy, Interval, adaptive_fit
from .consensus import ConsensusOutcome, intersect_constraints, run_average_consensus_with_stopping
from .errors import CpcaError
from .netgraph import Graph, diameter
from .polyalg import minimize_by_stationary_points
from .sdp import minimize_by_sdp


class Backend(enum.Enum):
    SDP = "sdp"
    STATIONARY = "stationary"


@dataclass(frozen=True)
class CpcaConfig:
    eps: float
    budget: tuple | None = None  # (eps1, eps2, eps3); defaults to eps / 3 each
    backend: Backend = Backend.STATIONARY
    U: int | None = None  # diameter bound; None means use the exact diameter
    m_max: int = DEFAULT_M_MAX
    strict_fit: bool = False
    sdp_max_iters: int = 100

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        budget = self.budget if self.budget is not None else (self.eps / 3,) * 3
        budget = tuple(float(b) for b in budget)
        if len(budget) != 3 or min(budget) <= 0:
            raise ValueError("budget needs three positive parts")
        if abs(sum(budget) - self.eps) > 1e-12 * self.eps:
            raise ValueError(f"budget {budget} does not sum to eps={self.eps}")
        object.__setattr__(self, "budget", budget)
        object.__setattr__(self, "backend", Backend(self.backend))

    @property
    def eps1(self) -> float:
        return self.budget[0]

    @property
    def eps2(self) -> float:
        return self.budget[1]

    @property
    def eps3(self) -> float:
        return self.budget[2]


@dataclass
class CpcaMetrics:
    queries_per_agent: list
    consensus_rounds: int
    max_proxy_degree: int


@dataclass
class CpcaResult:
    f_e_star: np.ndarray
    minimizer_sets: list
    metrics: CpcaMetrics
    interval: Interval
    U: int
    local_proxies: list = field(repr=False)
    fit_reports: list = field(repr=False)
    final_proxies: list = field(repr=False)
    consensus: ConsensusOutcome = field(repr=False)


def recover_proxy(vector, iv: Interval) -> ChebProxy:
    """Wrap a consensus coefficient vector as a proxy on ``iv`` (no trimming)."""
    return ChebProxy(iv, np.asarray(vector, dtype=float))


def _stage(name: str):
    class _Labeler:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if isinstance(exc, CpcaError) and exc.stage is None:
                exc.stage = name
            return False

    return _Labeler()


def run_cpca(
    objectives: Sequence[Callable],
    constraint_intervals: Sequence,
    g: Graph,
    cfg: CpcaConfig,
) -> CpcaResult:
    """Run the three CPCA stages on a simulated network.

    Errors from any stage propagate with ``exc.stage`` set to one of
    ``"intersect"``, ``"approximate"``, ``"consensus"`` or ``"optimize"``.
    """
    if len(objectives) != g.n:
        raise ValueError(f"{len(objectives)} objectives for {g.n} agents")
    U = cfg.U if cfg.U is not None else max(1, diameter(g))

    with _stage("intersect"):
        iv = intersect_constraints(g, constraint_intervals, U)

    with _stage("approximate"):
        fits = [adaptive_fit(f, iv, cfg.eps1, m_max=cfg.m_max, strict=cfg.strict_fit) for f in objectives]
    local = [p for p, _ in fits]
    reports: list[ApproxReport] = [r for _, r in fits]

    with _stage("consensus"):
        outcome = run_average_consensus_with_stopping(g, [p.coeffs for p in local], cfg.eps2, U)

    values = np.empty(g.n)
    minimizers = []
    finals = []
    with _stage("optimize"):
        for i, vec in enumerate(outcome.final_vectors):
            proxy = recover_proxy(vec, iv)
            finals.append(proxy)
            f_sp, xs = minimize_by_stationary_points(proxy)
            if cfg.backend is Backend.SDP:
                values[i] = minimize_by_sdp(proxy, cfg.eps3, max_iters=cfg.sdp_max_iters)
            else:
                values[i] = f_sp
            minimizers.append(xs)

    metrics = CpcaMetrics(
        queries_per_agent=[r.evals_used for r in reports],
        consensus_rounds=outcome.rounds,
        max_proxy_degree=max(p.degree for p in local),
    )
    return CpcaResult(
        f_e_star=values,
        minimizer_sets=minimizers,
        metrics=metrics,
        interval=iv,
        U=U,
        local_proxies=local,
        fit_reports=reports,
        final_proxies=finals,
        consensus=outcome,
    )


def bi_lipschitz_bound(L: float, eps: float) -> float:
    """Distance bound ``4 L eps / 3`` between proxy and true minimizers."""
    if L < 1 or not math.isfinite(L):
        raise ValueError("L must be finite and at least 1")
    return 4.0 * L * eps / 3.0
