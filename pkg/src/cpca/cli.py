"""Command-line entry point: ``cpca {fit,optimize-poly,consensus-demo,run,sweep}``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import harness
from .algorithm import Backend, CpcaConfig, run_cpca
from .chebfit import DEFAULT_M_MAX, ChebProxy, Interval, adaptive_fit
from .consensus import run_average_consensus_with_stopping, write_trace_csv
from .errors import InstanceError, NumericalError
from .netgraph import diameter, read_edge_list
from .polyalg import minimize_by_stationary_points
from .sdp import build_reformulation, format_problem, solve_sdp

EXIT_OK, EXIT_INSTANCE, EXIT_NUMERICAL = 0, 2, 3

_EXPR_NAMESPACE = {
    name: getattr(np, name)
    for name in ("sin", "cos", "tan", "exp", "log", "log1p", "sqrt", "abs", "tanh", "arctan", "pi", "e")
}


def _expr_function(expr: str):
    code = compile(expr, "<expr>", "eval")

    def f(x):
        return eval(code, {"__builtins__": {}}, {**_EXPR_NAMESPACE, "x": np.asarray(x, dtype=float)})

    return f


def _emit(payload, output):
    text = json.dumps(payload, indent=2)
    if output:
        Path(output).write_text(text + "\n")
    else:
        print(text)


def _load_vector_list(path):
    raw = Path(path).read_text().strip()
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return [[float(tok) for tok in line.split()] for line in raw.splitlines() if line.strip()]


def _graph_from_args(args):
    if getattr(args, "graph", None):
        return read_edge_list(args.graph)
    return harness.build_graph(args.agents, args.edge_prob, args.seed)


def cmd_fit(args):
    iv = Interval(*args.interval)
    if args.expr:
        f = _expr_function(args.expr)
    else:
        f = harness.sample_objective(args.objective, args.seed, args.agent)
    p, rep = adaptive_fit(f, iv, args.eps, m_max=args.m_max, strict=args.strict)
    _emit(
        {
            "interval": [iv.lo, iv.hi],
            "degree": rep.degree,
            "check_error": rep.achieved_check_error,
            "evals_used": rep.evals_used,
            "coeffs": p.coeffs.tolist(),
        },
        args.output,
    )


def cmd_optimize_poly(args):
    coeffs = np.array(_load_vector_list(args.coeffs), dtype=float).ravel()
    iv = Interval(*args.interval)
    p = ChebProxy(iv, coeffs)
    f_sp, xs = minimize_by_stationary_points(p)
    payload = {"degree": p.degree, "stationary": {"value": f_sp, "minimizers": xs}}
    if p.degree >= 1:
        prob = build_reformulation(coeffs)
        if args.dump_sdp:
            Path(args.dump_sdp).write_text(format_problem(prob) + "\n")
        sol = solve_sdp(prob, args.eps)
        payload["sdp"] = {
            "value": sol.t_upper,
            "lower_bound": sol.t_lower,
            "gap": sol.gap,
            "status": sol.status.value,
            "iterations": sol.iterations,
        }
        if sol.status.value != "Optimal":
            _emit(payload, args.output)
            return EXIT_NUMERICAL
    else:
        payload["sdp"] = {"value": float(coeffs[0]), "status": "Optimal"}
    _emit(payload, args.output)
    return EXIT_OK


def cmd_consensus_demo(args):
    g = _graph_from_args(args)
    if args.vectors:
        init = _load_vector_list(args.vectors)
    else:
        rng = np.random.default_rng(args.seed)
        init = [rng.standard_normal(rng.integers(2, 9)) for _ in range(g.n)]
    U = args.upper_bound_U or max(1, diameter(g))
    out = run_average_consensus_with_stopping(g, init, args.eps, U, record_trace=True)
    if args.output:
        write_trace_csv(out.trace, args.output)
    print(
        json.dumps(
            {
                "rounds": out.rounds,
                "delta": out.delta_used,
                "aligned_degree": out.aligned_degree,
                "max_dev_from_mean": float(np.max(np.abs(out.final_vectors - out.mean))),
            }
        )
    )


def cmd_run(args):
    g = _graph_from_args(args)
    objectives = [harness.sample_objective(args.objective, args.seed, i) for i in range(g.n)]
    cfg = CpcaConfig(eps=args.eps, backend=Backend(args.backend), U=args.upper_bound_U, m_max=args.m_max)
    res = run_cpca(objectives, [harness.DOMAIN] * g.n, g, cfg)
    payload = {
        "interval": [res.interval.lo, res.interval.hi],
        "U": res.U,
        "f_e_star": res.f_e_star.tolist(),
        "minimizers_agent0": res.minimizer_sets[0],
        "consensus_rounds": res.metrics.consensus_rounds,
        "queries_per_agent": res.metrics.queries_per_agent,
        "max_proxy_degree": res.metrics.max_proxy_degree,
    }
    if args.oracle:
        f_star, x_star = harness.brute_force_min(harness.Average(tuple(objectives)))
        payload["oracle"] = {"f_star": f_star, "x_star": x_star, "max_abs_error": float(np.max(np.abs(res.f_e_star - f_star)))}
    _emit(payload, args.output)


def cmd_sweep(args):
    if args.config:
        spec = harness.ExperimentSpec.from_json(args.config)
    else:
        spec = harness.ExperimentSpec(
            family=args.objective,
            n_agents=args.agents,
            edge_prob=args.edge_prob,
            seeds=[args.seed],
            eps_list=[args.eps],
            backend=args.backend,
            U_policy=args.upper_bound_U or "exact",
        )
    records = harness.run_sweep(spec, output=args.output)
    if not args.output:
        harness.write_metrics_csv(records, sys.stdout)
    return EXIT_OK if all(r.status == "ok" for r in records) else EXIT_NUMERICAL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--eps", type=float, default=1e-4)
    common.add_argument("--output", default=None, help="output path (stdout if omitted)")

    net = argparse.ArgumentParser(add_help=False)
    net.add_argument("--agents", type=int, default=30)
    net.add_argument("--edge-prob", type=float, default=0.4)
    net.add_argument("--graph", default=None, help="edge-list file ('n=<count>' header, 'u v' lines)")
    net.add_argument("--upper-bound-U", type=int, default=None, help="diameter bound (default: exact diameter)")

    algo = argparse.ArgumentParser(add_help=False)
    algo.add_argument("--objective", choices=["expsum", "logisticlog"], default="expsum")
    algo.add_argument("--backend", choices=["sdp", "stationary"], default="stationary")
    algo.add_argument("--m-max", type=int, default=DEFAULT_M_MAX)

    parser = argparse.ArgumentParser(prog="cpca", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit a Chebyshev proxy and report it")
    p.add_argument("--objective", choices=["expsum", "logisticlog"], default="expsum")
    p.add_argument("--agent", type=int, default=0)
    p.add_argument("--expr", default=None, help="numpy expression in x, e.g. 'exp(x)*sin(3*x)'")
    p.add_argument("--interval", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--m-max", type=int, default=DEFAULT_M_MAX)
    p.add_argument("--strict", action="store_true", help="also check a 33-point uniform grid")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("optimize-poly", parents=[common], help="minimize a Chebyshev series with both backends")
    p.add_argument("coeffs", help="file with coefficients (JSON list or whitespace separated)")
    p.add_argument("--interval", type=float, nargs=2, default=[-1.0, 1.0])
    p.add_argument("--dump-sdp", default=None, help="write the SDP constraint listing here")
    p.set_defaults(func=cmd_optimize_poly)

    p = sub.add_parser("consensus-demo", parents=[common, net], help="consensus with stopping, trace CSV")
    p.add_argument("--vectors", default=None, help="JSON list of per-agent vectors (random if omitted)")
    p.set_defaults(func=cmd_consensus_demo)

    p = sub.add_parser("run", parents=[common, net, algo], help="one CPCA instance")
    p.add_argument("--oracle", action="store_true", help="also compute the brute-force optimum")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common, net, algo], help="metrics sweep to CSV")
    p.add_argument("config", nargs="?", default=None, help="JSON file mirroring ExperimentSpec")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        code = args.func(args)
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INSTANCE
    except NumericalError as exc:
        stage = f" (stage: {exc.stage})" if exc.stage else ""
        print(f"numerical failure{stage}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK if code is None else code


if __name__ == "__main__":
    sys.exit(main())
