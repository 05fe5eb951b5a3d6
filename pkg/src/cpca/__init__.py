"""Distributed minimization of a sum of univariate objectives via Chebyshev proxies.

Each agent replaces its objective by a Chebyshev interpolant, the network
averages the coefficient vectors with a consensus protocol that knows when
to stop, and every agent minimizes the averaged polynomial locally, either
from its stationary points or through a semidefinite program.
"""

from .algorithm import Backend, CpcaConfig, CpcaMetrics, CpcaResult, bi_lipschitz_bound, recover_proxy, run_cpca
from .chebfit import (
    ApproxReport,
    ChebProxy,
    Interval,
    adaptive_fit,
    cheb_points,
    coeffs_from_values,
    eval_clenshaw,
    max_error_on_grid,
)
from .consensus import (
    AgentState,
    ConsensusOutcome,
    intersect_constraints,
    pad_align,
    run_average_consensus_with_stopping,
)
from .errors import (
    CpcaError,
    DegreeCapExceeded,
    EmptyIntersection,
    InstanceError,
    NotConnectedAfterRetries,
    NumericalError,
    RoundCapExceeded,
    SolverFailure,
    TrailingCoeffDropped,
)
from .netgraph import Graph, complete_graph, diameter, erdos_renyi_connected, lazy_metropolis_weights, path_graph
from .polyalg import colleague_matrix, derivative_coeffs, minimize_by_stationary_points, real_roots_in_interval
from .sdp import SdpProblem, SdpSolution, Status, build_reformulation, minimize_by_sdp, solve_sdp

__version__ = "0.1.0"
