"""Synchronous consensus rounds with distributed stopping.

All agents advance in lock step. Coefficient vectors are averaged with
lazy-Metropolis weights, while two auxiliary vectors run max and min
consensus over closed neighborhoods and are reset to the current estimate
every ``U`` rounds. At ``t = l U`` each agent tests
``max_k (r_i(k) - s_i(k)) <= delta``; because ``U`` bounds the diameter,
every agent holds the same ``r`` and ``s`` at that instant and so stops in
the same round.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .chebfit import Interval
from .errors import EmptyIntersection, InstanceError, RoundCapExceeded
from .netgraph import Graph, lazy_metropolis_weights

ROUND_CAP = 10**6


@dataclass
class AgentState:
    p: np.ndarray
    r: np.ndarray
    s: np.ndarray


@dataclass
class ConsensusOutcome:
    final_vectors: np.ndarray  # (N, aligned_degree + 1)
    rounds: int
    delta_used: float
    aligned_degree: int
    mean: np.ndarray  # exact average of the (padded) initial vectors
    checks: list = field(default_factory=list)  # (round, passed) at t = l U
    trace: list = field(default_factory=list)

    def agent_states(self) -> list[AgentState]:
        return [AgentState(p, p.copy(), p.copy()) for p in self.final_vectors]


def _closed_mask(g: Graph) -> np.ndarray:
    return g.adjacency() | np.eye(g.n, dtype=bool)


def _neighborhood_max(mask: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Row ``i`` becomes the elementwise max over the closed neighborhood of ``i``."""
    if values.ndim == 1:
        return np.where(mask, values[None, :], -np.inf).max(axis=1)
    return np.where(mask[:, :, None], values[None, :, :], -np.inf).max(axis=1)


def intersect_constraints(g: Graph, intervals, U: int) -> Interval:
    """Run ``U`` rounds of max consensus on lower ends and min consensus on upper ends.

    Raises
    ------
    EmptyIntersection
        If the common interval is empty or degenerate.
    InstanceError
        If ``U`` was too small for the agents to agree.
    """
    if len(intervals) != g.n:
        raise InstanceError(f"{len(intervals)} intervals for {g.n} agents")
    lo = np.array([iv.lo if isinstance(iv, Interval) else iv[0] for iv in intervals], dtype=float)
    hi = np.array([iv.hi if isinstance(iv, Interval) else iv[1] for iv in intervals], dtype=float)
    mask = _closed_mask(g)
    for _ in range(U):
        lo = _neighborhood_max(mask, lo)
        hi = -_neighborhood_max(mask, -hi)
    if np.ptp(lo) != 0.0 or np.ptp(hi) != 0.0:
        raise InstanceError(f"agents disagree after U={U} rounds; U is below the diameter")
    if not lo[0] < hi[0]:
        raise EmptyIntersection(lo[0], hi[0])
    return Interval(lo[0], hi[0])


def pad_align(vectors, g: Graph | None = None) -> list[np.ndarray]:
    """Zero-pad vectors to a common length.

    With a graph, performs one exchange: each agent pads to the longest
    vector among itself and its neighbors. Without one, pads everything to
    the global maximum length.
    """
    vecs = [np.asarray(v, dtype=float).ravel() for v in vectors]
    lengths = np.array([v.size for v in vecs])
    if g is None:
        target = np.full(len(vecs), lengths.max())
    else:
        target = _neighborhood_max(_closed_mask(g), lengths.astype(float)).astype(int)
    return [np.pad(v, (0, int(L) - v.size)) for v, L in zip(vecs, target)]


def run_average_consensus_with_stopping(
    g: Graph,
    init,
    eps2: float,
    U: int,
    round_cap: int = ROUND_CAP,
    record_trace: bool = False,
) -> ConsensusOutcome:
    """Average consensus on coefficient vectors until the distributed test passes.

    ``delta = eps2 / (m + 1)`` is fixed at the first check, where ``m + 1``
    is the aligned vector length. On return every agent's vector lies
    within ``delta`` (in the max norm) of the exact average.

    Vectors of different lengths are aligned by zero padding as longer
    vectors arrive. Padding a vector early is harmless (its missing entries
    are zeros either way), so the state is kept as one zero-padded matrix
    and only the per-agent known lengths are tracked.

    Raises
    ------
    RoundCapExceeded
        If no check passes within ``round_cap`` rounds.
    """
    if eps2 <= 0:
        raise ValueError("eps2 must be positive")
    if U < 1:
        raise ValueError("U must be at least 1")
    vecs = [np.asarray(v, dtype=float).ravel() for v in init]
    if len(vecs) != g.n:
        raise InstanceError(f"{len(vecs)} vectors for {g.n} agents")
    known = np.array([v.size for v in vecs], dtype=float)
    P = np.stack(pad_align(vecs))
    mean = P.mean(axis=0)
    W = lazy_metropolis_weights(g)
    mask = _closed_mask(g)
    R = P.copy()
    S = P.copy()

    delta = None
    checks = []
    trace = []
    t = 0
    l = 1
    while True:
        verdict = ""
        if t == l * U:
            if l == 1:
                if np.any(known != known[0]):
                    raise InstanceError("vector lengths not aligned at the first check; U is below the diameter")
                delta = eps2 / known[0]
            passed = np.max(R - S, axis=1) <= delta
            if np.any(passed != passed[0]):
                raise AssertionError(f"agents disagree on the stopping test at round {t}")
            checks.append((t, bool(passed[0])))
            verdict = "pass" if passed[0] else "fail"
            if passed[0]:
                if record_trace:
                    trace.append((t, float(np.max(np.abs(P - mean))), verdict))
                break
            R = P.copy()
            S = P.copy()
            l += 1
        if record_trace:
            trace.append((t, float(np.max(np.abs(P - mean))), verdict))
        if t >= round_cap:
            raise RoundCapExceeded(f"stopping test not met within {round_cap} rounds")
        P = W @ P
        R = _neighborhood_max(mask, R)
        S = -_neighborhood_max(mask, -S)
        known = _neighborhood_max(mask, known)
        t += 1

    return ConsensusOutcome(
        final_vectors=P,
        rounds=t,
        delta_used=float(delta),
        aligned_degree=int(known[0]) - 1,
        mean=mean,
        checks=checks,
        trace=trace,
    )


def write_trace_csv(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["round", "max_dev_from_mean", "stop_check"])
        for t, dev, verdict in trace:
            w.writerow([t, repr(dev), verdict])
