import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cpca.chebfit import Interval
from cpca.consensus import (
    intersect_constraints,
    pad_align,
    run_average_consensus_with_stopping,
    write_trace_csv,
)
from cpca.errors import EmptyIntersection, InstanceError, NotConnectedAfterRetries, RoundCapExceeded
from cpca.netgraph import Graph, complete_graph, diameter, erdos_renyi_connected, lazy_metropolis_weights, path_graph


def simulate_agents(g, init, eps2, U):
    """Literal message-passing simulation: each agent keeps its own vectors of its
    own length and pads on receipt. Used as an oracle for the matrix engine."""
    W = lazy_metropolis_weights(g)
    p = [np.asarray(v, dtype=float) for v in init]
    r = [v.copy() for v in p]
    s = [v.copy() for v in p]

    def padded(v, L):
        return np.pad(v, (0, L - v.size))

    t, l, delta = 0, 1, None
    while True:
        if t == l * U:
            if l == 1:
                delta = eps2 / p[0].size
            ok = [np.max(ri - si) <= delta for ri, si in zip(r, s)]
            assert len(set(ok)) == 1
            if ok[0]:
                return p, t, delta
            r = [v.copy() for v in p]
            s = [v.copy() for v in p]
            l += 1
        new_p, new_r, new_s = [], [], []
        for i in range(g.n):
            hood = (i,) + g.neighbors(i)
            L = max(p[j].size for j in hood)
            new_p.append(sum(W[i, j] * padded(p[j], L) for j in hood))
            new_r.append(np.max([padded(r[j], L) for j in hood], axis=0))
            new_s.append(np.min([padded(s[j], L) for j in hood], axis=0))
        p, r, s = new_p, new_r, new_s
        t += 1


class TestIntersect:
    def test_two_agents(self):
        iv = intersect_constraints(complete_graph(2), [Interval(-1, 1), Interval(0, 2)], 1)
        assert iv == Interval(0, 1)

    def test_identity(self):
        g = erdos_renyi_connected(10, 0.4, 1)
        assert intersect_constraints(g, [(-1, 1)] * 10, diameter(g)) == Interval(-1, 1)

    def test_disjoint(self):
        with pytest.raises(EmptyIntersection):
            intersect_constraints(complete_graph(2), [Interval(0, 1), Interval(2, 3)], 1)

    def test_touching_is_empty(self):
        with pytest.raises(EmptyIntersection):
            intersect_constraints(complete_graph(2), [(0, 1), (1, 2)], 1)

    def test_u_too_small(self):
        with pytest.raises(InstanceError):
            intersect_constraints(path_graph(4), [(0, 1), (0, 1), (0, 1), (0.5, 2)], 1)

    @given(st.integers(2, 12), st.integers(0, 10**6))
    def test_matches_direct_intersection(self, n, seed):
        rng = np.random.default_rng(seed)
        lo = rng.uniform(-2, 0, n)
        hi = rng.uniform(0.1, 2, n)
        g = path_graph(n)
        iv = intersect_constraints(g, list(zip(lo, hi)), n - 1)
        assert (iv.lo, iv.hi) == (lo.max(), hi.min())


class TestPadAlign:
    def test_edge(self):
        out = pad_align([np.ones(3), np.ones(5)], complete_graph(2))
        assert [v.size for v in out] == [5, 5]
        np.testing.assert_array_equal(out[0], [1, 1, 1, 0, 0])

    def test_identity(self):
        vecs = [np.arange(4.0), np.ones(4)]
        out = pad_align(vecs, complete_graph(2))
        for a, b in zip(out, vecs):
            np.testing.assert_array_equal(a, b)

    def test_path_two_rounds(self):
        g = path_graph(3)
        vecs = [np.ones(3), np.ones(3), np.ones(9)]
        once = pad_align(vecs, g)
        assert [v.size for v in once] == [3, 9, 9]
        twice = pad_align(once, g)
        assert [v.size for v in twice] == [9, 9, 9]

    def test_global(self):
        assert [v.size for v in pad_align([[1.0], [1.0, 2.0, 3.0]])] == [3, 3]


class TestStopping:
    def test_all_equal_stops_at_first_check(self):
        g = erdos_renyi_connected(8, 0.5, 2)
        U = diameter(g)
        init = [np.array([1.0, -2.0, 0.5])] * 8
        out = run_average_consensus_with_stopping(g, init, 1e-6, U)
        assert out.rounds == U
        np.testing.assert_allclose(out.final_vectors, np.stack(init), atol=1e-15)

    def test_two_node_hand_simulation(self):
        out = run_average_consensus_with_stopping(complete_graph(2), [[0.0], [2.0]], 1e-6, 1)
        np.testing.assert_array_equal(out.final_vectors, [[1.0], [1.0]])
        # r and s differ at t=1 (they hold 2 and 0); after the reset they coincide, so t=2 passes
        assert out.checks == [(1, False), (2, True)]
        assert out.rounds == 2

    def test_reference_instance(self, rng):
        g = erdos_renyi_connected(30, 0.4, 42)
        init = [rng.standard_normal(int(rng.integers(3, 18))) for _ in range(30)]
        out = run_average_consensus_with_stopping(g, init, 1e-6, diameter(g))
        assert np.max(np.abs(out.final_vectors - out.mean)) <= out.delta_used
        assert out.delta_used == pytest.approx(1e-6 / (out.aligned_degree + 1))

    def test_padding_engine_matches_literal_simulation(self, rng):
        g = erdos_renyi_connected(12, 0.25, 4)
        U = diameter(g)
        init = [rng.standard_normal(int(rng.integers(2, 9))) for _ in range(12)]
        out = run_average_consensus_with_stopping(g, init, 1e-5, U)
        p, rounds, delta = simulate_agents(g, init, 1e-5, U)
        assert out.rounds == rounds and out.delta_used == delta
        np.testing.assert_allclose(out.final_vectors, np.stack(p), atol=1e-14)

    def test_u_too_small_for_alignment(self):
        g = path_graph(4)
        with pytest.raises(InstanceError):
            run_average_consensus_with_stopping(g, [[1.0], [1.0], [1.0], [1.0, 2.0]], 1e-3, 1)

    def test_round_cap(self):
        g = path_graph(6)
        with pytest.raises(RoundCapExceeded):
            run_average_consensus_with_stopping(g, [[float(i)] for i in range(6)], 1e-12, 5, round_cap=20)

    def test_trace(self, tmp_path):
        g = complete_graph(3)
        out = run_average_consensus_with_stopping(g, [[0.0], [3.0], [6.0]], 1e-3, 1, record_trace=True)
        assert [row[0] for row in out.trace] == list(range(out.rounds + 1))
        assert out.trace[-1][2] == "pass"
        write_trace_csv(out.trace, tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "round,max_dev_from_mean,stop_check"
        assert len(lines) == out.rounds + 2

    def test_mean_preserved(self, rng):
        g = erdos_renyi_connected(15, 0.3, 8)
        init = [rng.standard_normal(5) for _ in range(15)]
        out = run_average_consensus_with_stopping(g, init, 1e-4, diameter(g))
        np.testing.assert_allclose(out.final_vectors.mean(axis=0), np.mean(init, axis=0), atol=1e-13)

    @given(st.integers(2, 15), st.floats(0.2, 0.9), st.integers(0, 10**6), st.floats(1e-9, 1e-1))
    def test_soundness_property(self, n, p, seed, eps2):
        try:
            g = erdos_renyi_connected(n, p, seed)
        except NotConnectedAfterRetries:
            return
        rng = np.random.default_rng(seed)
        init = [rng.uniform(-10, 10, int(rng.integers(1, 10))) for _ in range(n)]
        U = diameter(g) + int(rng.integers(0, 3))
        out = run_average_consensus_with_stopping(g, init, eps2, U)
        assert np.max(np.abs(out.final_vectors - out.mean)) <= out.delta_used
        assert out.rounds % U == 0
        assert all(not ok for _, ok in out.checks[:-1]) and out.checks[-1][1]
