"""Undirected communication graphs: Erdos-Renyi sampling, diameter, weights.

Random graphs are drawn with numpy's PCG64 generator
(``numpy.random.default_rng(seed)``), visiting candidate edges ``(i, j)``,
``i < j``, in lexicographic order with one uniform draw each, so a given
``(n, p, seed)`` reproduces the same graph on every platform.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InstanceError, NotConnectedAfterRetries

MAX_ATTEMPTS = 1000


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError("a graph needs at least one node")
        norm = set()
        for u, v in self.edges:
            u, v = int(u), int(v)
            if u == v:
                raise InstanceError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise InstanceError(f"edge ({u}, {v}) outside 0..{self.n - 1}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [[] for _ in range(self.n)]
        for u, v in sorted(norm):
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(a) for a in adj))

    def neighbors(self, i: int) -> tuple:
        return self._adj[i]

    @property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self._adj])

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.n, self.n), dtype=bool)
        for u, v in self.edges:
            A[u, v] = A[v, u] = True
        return A

    def is_connected(self) -> bool:
        return bool(np.all(_bfs(self, 0) >= 0))


def complete_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, j) for i in range(n) for j in range(i + 1, n)))


def path_graph(n: int) -> Graph:
    return Graph(n, frozenset((i, i + 1) for i in range(n - 1)))


def erdos_renyi_connected(n: int, p: float, seed: int) -> Graph:
    """Sample G(n, p), resampling the whole graph until it is connected.

    Raises
    ------
    NotConnectedAfterRetries
        If no connected sample appears within 1000 attempts.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if not 0.0 < p <= 1.0:
        raise ValueError("p must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(MAX_ATTEMPTS):
        keep = rng.random(iu.size) < p
        g = Graph(n, frozenset(zip(iu[keep].tolist(), ju[keep].tolist())))
        if g.is_connected():
            return g
    raise NotConnectedAfterRetries(
        f"no connected G({n}, {p}) sample in {MAX_ATTEMPTS} attempts; raise p"
    )


def _bfs(g: Graph, src: int) -> np.ndarray:
    dist = np.full(g.n, -1)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def diameter(g: Graph) -> int:
    """Exact diameter by breadth-first search from every node."""
    best = 0
    for s in range(g.n):
        d = _bfs(g, s)
        if np.any(d < 0):
            raise InstanceError("graph is not connected")
        best = max(best, int(d.max()))
    return best


def lazy_metropolis_weights(g: Graph) -> np.ndarray:
    """``w_ij = 1 / (2 max(deg i, deg j))`` on edges, the remainder on the diagonal."""
    deg = g.degrees
    W = np.zeros((g.n, g.n))
    for u, v in g.edges:
        W[u, v] = W[v, u] = 1.0 / (2.0 * max(deg[u], deg[v]))
    W[np.diag_indices(g.n)] = 1.0 - W.sum(axis=1)
    return W


def write_edge_list(g: Graph, path) -> None:
    lines = [f"n={g.n}"] + [f"{u} {v}" for u, v in sorted(g.edges)]
    Path(path).write_text("\n".join(lines) + "\n")


def read_edge_list(path) -> Graph:
    """Read the ``n=<count>`` header followed by one ``u v`` pair per line."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("n="):
        raise InstanceError("edge list must start with an 'n=<count>' header")
    n = int(lines[0][2:])
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 2:
            raise InstanceError(f"malformed edge line: {ln!r}")
        edges.append((int(parts[0]), int(parts[1])))
    return Graph(n, frozenset(edges))
