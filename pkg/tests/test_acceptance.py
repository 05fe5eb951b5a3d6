"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` (lines are repeated in the
terminal summary) or directly with ``python tests/test_acceptance.py``.
"""

import math
import sys
import time
from pathlib import Path

import numpy as np
import numpy.polynomial.chebyshev as npcheb
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, decaying_coeffs  # noqa: E402

from cpca.algorithm import Backend, CpcaConfig, bi_lipschitz_bound, run_cpca  # noqa: E402
from cpca.chebfit import ChebProxy, Interval, adaptive_fit, cheb_points, coeffs_from_values  # noqa: E402
from cpca.consensus import run_average_consensus_with_stopping  # noqa: E402
from cpca.errors import NotConnectedAfterRetries  # noqa: E402
from cpca.harness import DOMAIN, Average, brute_force_min, sample_objective  # noqa: E402
from cpca.netgraph import diameter, erdos_renyi_connected, lazy_metropolis_weights  # noqa: E402
from cpca.polyalg import colleague_matrix, derivative_coeffs, minimize_by_stationary_points  # noqa: E402
from cpca.sdp import Status, build_reformulation, solve_sdp  # noqa: E402

UNIT = Interval(-1.0, 1.0)


def report(number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} | {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)
    return ok


# 1 --------------------------------------------------------------------------

EPS_GRID = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6]
SEEDS = range(10)


def test_criterion_1_eps_optimality():
    worst_ratio, worst_time, violations, runs = 0.0, 0.0, [], 0
    for family in ("expsum", "logisticlog"):
        for seed in SEEDS:
            g = erdos_renyi_connected(30, 0.4, seed)
            objs = [sample_objective(family, seed, i) for i in range(30)]
            f_star, _ = brute_force_min(Average(tuple(objs)))
            for eps in EPS_GRID:
                for backend in Backend:
                    start = time.perf_counter()
                    res = run_cpca(objs, [DOMAIN] * 30, g, CpcaConfig(eps, backend=backend))
                    elapsed = time.perf_counter() - start
                    err = float(np.max(np.abs(res.f_e_star - f_star)))
                    runs += 1
                    worst_ratio = max(worst_ratio, err / eps)
                    worst_time = max(worst_time, elapsed)
                    if err > eps:
                        violations.append((family, seed, eps, backend.value, err))
    ok = report(
        1,
        "eps-optimality, 2 families x 10 seeds x 5 eps x 2 backends, N=30",
        not violations,
        f"{runs} runs, violations={len(violations)}, max err/eps={worst_ratio:.3g}, slowest run {worst_time:.2f}s",
    )
    assert ok, violations[:5]
    assert worst_time < 10.0


# 2 --------------------------------------------------------------------------


def test_criterion_2_stopping_soundness():
    rng = np.random.default_rng(2)
    instances, violations, worst = 0, 0, 0.0
    while instances < 120:
        n = int(rng.integers(2, 41))
        try:
            g = erdos_renyi_connected(n, float(rng.uniform(0.1, 0.9)), int(rng.integers(0, 2**31)))
        except NotConnectedAfterRetries:
            continue
        init = [rng.uniform(-10, 10, int(rng.integers(1, 20))) for _ in range(n)]
        eps2 = 10.0 ** rng.uniform(-10, -1)
        out = run_average_consensus_with_stopping(g, init, eps2, max(1, diameter(g)))
        # mean recomputed independently of the engine
        L = max(v.size for v in init)
        p_bar = np.mean([np.pad(v, (0, L - v.size)) for v in init], axis=0)
        dev = float(np.max(np.abs(out.final_vectors - p_bar)))
        worst = max(worst, dev / out.delta_used)
        violations += dev > out.delta_used
        instances += 1
    ok = report(2, "consensus stopping soundness", violations == 0, f"{instances} instances, violations={violations}, max dev/delta={worst:.3g}")
    assert ok


# 3 --------------------------------------------------------------------------


def test_criterion_3_sdp_equivalence():
    rng = np.random.default_rng(3)
    eps3 = 1e-6
    tol = eps3 + 1e-6
    worst_oracle, worst_backend, bad, parities = 0.0, 0.0, 0, set()
    for k in range(50):
        m = 3 + k % 10
        parities.add(m % 2)
        c = decaying_coeffs(rng, m, 0.8)
        ref, _ = brute_force_min(lambda x: npcheb.chebval(x, c))
        sol = solve_sdp(build_reformulation(c), eps3)
        f_sp, _ = minimize_by_stationary_points(ChebProxy(UNIT, c))
        d_oracle = abs(sol.t_upper - ref)
        d_backend = abs(sol.t_upper - f_sp)
        worst_oracle = max(worst_oracle, d_oracle)
        worst_backend = max(worst_backend, d_backend)
        bad += (d_oracle > tol) or (d_backend > tol) or sol.status is not Status.OPTIMAL
    ok = report(
        3,
        "SDP equivalence, 50 proxies of degree 3..12",
        bad == 0 and parities == {0, 1},
        f"failures={bad}, max|t_upper-oracle|={worst_oracle:.2e}, max|sdp-stationary|={worst_backend:.2e}, tol={tol:.0e}",
    )
    assert ok


# 4 --------------------------------------------------------------------------


def test_criterion_4_communication_scaling():
    g = erdos_renyi_connected(30, 0.4, 42)
    U = diameter(g)
    rng = np.random.default_rng(4)
    init = [rng.standard_normal(9) for _ in range(30)]
    deltas = [10.0**-k for k in range(2, 11)]
    # delta = eps2 / (m + 1), so eps2 = 9 delta targets delta exactly
    rounds = np.array([run_average_consensus_with_stopping(g, init, 9 * d, U).rounds for d in deltas], dtype=float)
    x = np.log(1 / np.array(deltas))
    slope, intercept = np.polyfit(x, rounds, 1)
    resid = rounds - (slope * x + intercept)
    r2 = 1 - np.sum(resid**2) / np.sum((rounds - rounds.mean()) ** 2)
    ok = report(4, "rounds vs log(1/delta) on ER(30,0.4,42)", r2 >= 0.95 and slope > 0, f"rounds={rounds.astype(int).tolist()}, slope={slope:.3f}/nat, R^2={r2:.4f}")
    assert ok


# 5 --------------------------------------------------------------------------


def test_criterion_5_query_complexity():
    g = erdos_renyi_connected(30, 0.4, 42)
    eps1 = 1e-6
    counts = [[0] * 30 for _ in range(3)]
    rounds, exact = [], True
    for run, eps2 in enumerate((1e-2, 1e-5, 1e-9)):
        def counted(i, f):
            def h(x):
                counts[run][i] += np.size(x)
                return f(x)
            return h

        objs = [counted(i, sample_objective("logisticlog", 5, i)) for i in range(30)]
        eps3 = 1e-6
        res = run_cpca(objs, [DOMAIN] * 30, g, CpcaConfig(eps1 + eps2 + eps3, budget=(eps1, eps2, eps3)))
        rounds.append(res.metrics.consensus_rounds)
        exact &= counts[run] == res.metrics.queries_per_agent == [2 * p.degree + 1 for p in res.local_proxies]
    invariant = counts[0] == counts[1] == counts[2]
    ok = report(
        5,
        "queries = 2m+1, invariant to consensus rounds",
        exact and invariant and len(set(rounds)) == 3,
        f"queries per agent {sorted(set(counts[0]))}, rounds {rounds}",
    )
    assert ok


# 6 --------------------------------------------------------------------------


def test_criterion_6_degree_growth():
    eps1s = [10.0**-k for k in range(2, 13)]
    L = np.log(1 / np.array(eps1s))
    details, ok = [], True
    for name, f in (("exp", np.exp), ("expsum", sample_objective("expsum", 0, 0))):
        deg = np.array([adaptive_fit(f, UNIT, e)[1].degree for e in eps1s], dtype=float)
        slope, intercept = np.polyfit(L, deg, 1)
        line = intercept + slope * L
        # accepted degrees are powers of two, so the true minimal degree can sit
        # up to a factor 2 below; the affine bound must hold within that factor
        bounded = np.all(deg <= 2 * line) and np.all(np.diff(deg) >= 0)
        ok &= bool(bounded)
        details.append(f"{name}: degrees {deg.astype(int).tolist()}, slope {slope:.3f}/nat")
    ok = report(6, "degree growth affine in log(1/eps1)", ok, "; ".join(details))
    assert ok


# 7 --------------------------------------------------------------------------


@pytest.mark.filterwarnings("ignore::cpca.errors.TrailingCoeffDropped")
def test_criterion_7_minimizer_accuracy():
    rng = np.random.default_rng(7)
    eps = 1e-4
    xs = np.linspace(-1, 1, 200_001)
    worst, violations = 0.0, 0
    for k in range(20):
        n = 6
        g = erdos_renyi_connected(n, 0.6, 100 + k)
        sign = 1.0 if k % 2 else -1.0
        params = [(rng.uniform(1, 2), rng.uniform(0, 0.5), rng.uniform(0.5, 1.5), rng.uniform(-1, 1)) for _ in range(n)]
        # a x + b sin(c x) + d with b c < a: strictly monotone, analytic
        objs = [lambda x, a=a, b=b, c=c, d=d: sign * (a * x + b * np.sin(c * x)) + d for a, b, c, d in params]
        fprime = sum(sign * (a + b * c * np.cos(c * xs)) for a, b, c, _ in params) / n
        Lip = max(1.0, np.max(np.abs(fprime)), 1.0 / np.min(np.abs(fprime)))
        x_f = -1.0 if sign > 0 else 1.0
        res = run_cpca(objs, [DOMAIN] * n, g, CpcaConfig(eps))
        bound = bi_lipschitz_bound(Lip, eps)
        dist = max(abs(x - x_f) for mins in res.minimizer_sets for x in mins)
        worst = max(worst, dist / bound)
        violations += dist > bound
    ok = report(7, "minimizer within (4/3) L eps, 20 monotone instances", violations == 0, f"violations={violations}, max dist/bound={worst:.3g}")
    assert ok


# 8 --------------------------------------------------------------------------


def test_criterion_8_unit_identities():
    checks = {}
    checks["x^2 = (T0+T2)/2"] = np.max(np.abs(coeffs_from_values(cheb_points(2, UNIT) ** 2) - [0.5, 0, 0.5])) <= 1e-15
    checks["d/dx T2 = 4 T1"] = np.array_equal(derivative_coeffs(ChebProxy(UNIT, np.array([0, 0, 1.0]))), [0, 4])
    ev = np.sort(np.linalg.eigvals(colleague_matrix([0, 0, 1.0])).real)
    checks["roots of T2"] = np.max(np.abs(ev - [-math.sqrt(2) / 2, math.sqrt(2) / 2])) <= 1e-10
    W = lazy_metropolis_weights(erdos_renyi_connected(30, 0.4, 42))
    checks["W doubly stochastic"] = max(np.max(np.abs(W.sum(0) - 1)), np.max(np.abs(W.sum(1) - 1))) <= 1e-14 and np.array_equal(W, W.T)
    ok = report(8, "numerical unit identities", all(checks.values()), ", ".join(f"{k}: {'ok' if v else 'FAIL'}" for k, v in checks.items()))
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
