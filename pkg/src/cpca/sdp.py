"""Minimizing a Chebyshev series on [-1, 1] as a semidefinite program.

``g(u) - t >= 0`` on ``[-1, 1]`` holds iff ``g - t`` is a weighted sum of
squares (Markov-Lukacs):

* odd degree m:  ``(1 + u) h1(u)^2 + (1 - u) h2(u)^2``
* even degree m: ``h1(u)^2 + (1 - u^2) h2(u)^2``

with ``deg h1 = m // 2`` and ``deg h2 = (m - 1) // 2``. Writing each square as
a Gram form ``v(u)^T Q v(u)`` in the Chebyshev basis and matching the
Chebyshev coefficients of both sides gives ``m + 1`` linear equalities in
``(t, Q, Q')``; maximizing ``t`` over PSD ``Q, Q'`` yields ``min g``.

The coefficient matching is assembled by expanding every product of
Chebyshev polynomials with ``T_u T_v = (T_{u+v} + T_{|u-v|}) / 2``, so a
pair ``(u, v)`` contributes once per term of its expansion.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .chebfit import ChebProxy, Interval, cheb_points, _clenshaw_unit
from .errors import SolverFailure

STEP_FRACTION = 0.98
_UNIT = Interval(-1.0, 1.0)


class Status(enum.Enum):
    OPTIMAL = "Optimal"
    MAX_ITERS = "MaxIters"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class SdpProblem:
    """``max t`` s.t. ``<A1[j], Q> + <A2[j], Q'> + t_coeff[j] t = rhs[j]``, ``Q, Q' >= 0``."""

    A1: np.ndarray  # (m + 1, d1 + 1, d1 + 1)
    A2: np.ndarray  # (m + 1, d2 + 1, d2 + 1)
    t_coeff: np.ndarray
    rhs: np.ndarray
    weights: tuple  # Chebyshev coefficients of the multipliers of h1^2, h2^2

    @property
    def block_dims(self) -> tuple[int, int]:
        return self.A1.shape[1], self.A2.shape[1]

    @property
    def n_constraints(self) -> int:
        return self.rhs.size


@dataclass
class SdpSolution:
    t_lower: float
    t_upper: float
    status: Status
    Q: np.ndarray
    Q2: np.ndarray
    y: np.ndarray
    iterations: int
    history: list = field(default_factory=list)  # (t_lower, t_upper) per iteration

    @property
    def gap(self) -> float:
        return self.t_upper - self.t_lower


def _product(a, b) -> np.ndarray:
    """Chebyshev coefficients of the product of two Chebyshev series."""
    out = np.zeros(len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0.0:
            continue
        for j, bj in enumerate(b):
            out[i + j] += 0.5 * ai * bj
            out[abs(i - j)] += 0.5 * ai * bj
    return out


def _gram_constraints(weight, d: int, m: int) -> np.ndarray:
    """``A[j, u, v]`` = coefficient of ``T_j`` in ``weight * T_u * T_v``."""
    A = np.zeros((m + 1, d + 1, d + 1))
    for u in range(d + 1):
        for v in range(d + 1):
            tu = np.zeros(u + 1)
            tu[u] = 1.0
            tv = np.zeros(v + 1)
            tv[v] = 1.0
            terms = _product(weight, _product(tu, tv))
            n = min(terms.size, m + 1)
            A[:n, u, v] = terms[:n]
            if np.any(terms[n:] != 0.0):
                raise AssertionError("Gram block degree exceeds the polynomial degree")
    return A


def build_reformulation(coeffs) -> SdpProblem:
    """Assemble the SDP whose optimal ``t`` is the minimum of ``sum c_j T_j`` on [-1, 1]."""
    c = np.asarray(coeffs, dtype=float).ravel()
    m = c.size - 1
    if m < 1:
        raise ValueError("reformulation needs degree >= 1")
    d1, d2 = m // 2, (m - 1) // 2
    if m % 2:
        w1, w2 = np.array([1.0, 1.0]), np.array([1.0, -1.0])
    else:
        w1, w2 = np.array([1.0]), np.array([0.5, 0.0, -0.5])
    t_coeff = np.zeros(m + 1)
    t_coeff[0] = 1.0
    return SdpProblem(
        A1=_gram_constraints(w1, d1, m),
        A2=_gram_constraints(w2, d2, m),
        t_coeff=t_coeff,
        rhs=c.copy(),
        weights=(w1, w2),
    )


def format_problem(prob: SdpProblem) -> str:
    """Plain-text listing of every constraint matrix, for external checking."""
    lines = [f"# block dims {prob.block_dims}, {prob.n_constraints} constraints, maximize t"]
    with np.printoptions(precision=17, suppress=False, linewidth=200):
        for j in range(prob.n_constraints):
            lines.append(f"constraint {j}: t_coeff={float(prob.t_coeff[j])!r} rhs={float(prob.rhs[j])!r}")
            lines.append("Q block:")
            lines.append(str(prob.A1[j]))
            lines.append("Q' block:")
            lines.append(str(prob.A2[j]))
    return "\n".join(lines)


def _apply(A, X) -> np.ndarray:
    return np.einsum("jab,ab->j", A, X)


def _adjoint(A, y) -> np.ndarray:
    return np.einsum("j,jab->ab", y, A)


def _sym(M):
    return 0.5 * (M + M.T)


def _max_step(X, dX) -> float:
    """Largest alpha with ``X + alpha dX`` PSD (``X`` positive definite)."""
    if X.size == 0:
        return np.inf
    L = np.linalg.cholesky(X)
    Li = np.linalg.inv(L)
    lam = np.linalg.eigvalsh(_sym(Li @ dX @ Li.T))[0]
    return np.inf if lam >= 0 else -1.0 / lam


def _newton_matrix(blocks, X, Sinv) -> np.ndarray:
    """Schur complement ``M[i, j] = sum tr(A_i X A_j S^-1)`` of the HKM direction."""
    M = sum(
        np.einsum("iab,bc,jcd,da->ij", A, Xk, A, Si, optimize=True)
        for A, Xk, Si in zip(blocks, X, Sinv)
    )
    return _sym(M)


def solve_sdp(prob: SdpProblem, eps3: float, max_iters: int = 100) -> SdpSolution:
    """Solve ``prob`` to an absolute duality gap of ``eps3``.

    Dense primal-dual path following with the HKM search direction and a
    Mehrotra predictor-corrector step. The free variable ``t`` enters the
    Newton system directly. The dual iterate starts at the Chebyshev-moment
    point ``y = e_0`` (strictly feasible) and stays feasible, so
    ``t_upper = rhs . y`` is always a valid upper bound on the optimum.
    ``t_lower`` is the primal objective minus the l1 norm of the primal
    residual, which is a valid lower bound because ``|T_j| <= 1``. The best
    bounds seen over all iterations are returned.
    """
    if eps3 <= 0:
        raise ValueError("eps3 must be positive")
    c = prob.rhs
    scale = max(float(np.max(np.abs(c))), 1e-300)
    b = c / scale
    blocks = [prob.A1, prob.A2]
    n = sum(A.shape[1] for A in blocks)
    e0 = prob.t_coeff

    t = (float(np.min(_clenshaw_unit(c, cheb_points(32, _UNIT)))) - 1.0) / scale
    X = [np.eye(A.shape[1]) for A in blocks]
    y = e0.astype(float).copy()
    S = [_adjoint(A, y) for A in blocks]

    def primal_residual(X, t):
        return b - sum(_apply(A, Xk) for A, Xk in zip(blocks, X)) - t * e0

    best_lo, best_up = -np.inf, np.inf
    best_X = X
    history = []
    status = Status.MAX_ITERS
    it = 0
    for it in range(max_iters + 1):
        rp = primal_residual(X, t)
        t_lo = (t - np.sum(np.abs(rp))) * scale
        t_up = float(b @ y) * scale
        history.append((t_lo, t_up))
        if t_lo > best_lo:
            best_lo, best_X = t_lo, X
        best_up = min(best_up, t_up)
        if best_up - best_lo <= eps3:
            status = Status.OPTIMAL
            break
        if it == max_iters or _stalled(history):
            break
        try:
            Sinv = [np.linalg.inv(Sk) for Sk in S]
            M = _newton_matrix(blocks, X, Sinv)
            K = np.zeros((M.shape[0] + 1, M.shape[0] + 1))
            K[:-1, :-1] = M
            K[:-1, -1] = -e0
            K[-1, :-1] = e0
            lu = _factor(K)
            # X-scaled correction map used to cancel the primal residual left
            # over by the ill-conditioned Schur solve
            N = _sym(sum(
                np.einsum("iab,bc,jcd,da->ij", A, Xk, A, Xk, optimize=True)
                for A, Xk in zip(blocks, X)
            ))
            N_lu = _factor(N)
            mu = sum(np.vdot(Xk, Sk) for Xk, Sk in zip(X, S)) / n

            def direction(sigma, corr):
                R = [sigma * mu * Si - Xk for Xk, Si in zip(X, Sinv)]
                if corr is not None:
                    R = [Rk - Ck @ Si for Rk, Ck, Si in zip(R, corr, Sinv)]
                rhs = np.empty(K.shape[0])
                rhs[:-1] = sum(_apply(A, Rk) for A, Rk in zip(blocks, R)) - rp
                rhs[-1] = 1.0 - y[0]
                sol = _solve(lu, rhs)
                dy, dt = sol[:-1], sol[-1]
                dX = [_sym(Rk - Xk @ _adjoint(A, dy) @ Si) for A, Rk, Xk, Si in zip(blocks, R, X, Sinv)]
                err = rp - sum(_apply(A, d) for A, d in zip(blocks, dX)) - dt * e0
                z = _solve(N_lu, err)
                dX = [d + Xk @ _adjoint(A, z) @ Xk for A, d, Xk in zip(blocks, dX, X)]
                dS = [_adjoint(A, dy) for A in blocks]
                ap = min([1.0] + [_max_step(Xk, d) for Xk, d in zip(X, dX)])
                ad = min([1.0] + [_max_step(Sk, d) for Sk, d in zip(S, dS)])
                return dX, dt, dy, dS, ap, ad

            dXa, _, _, dSa, ap, ad = direction(0.0, None)
            mu_aff = sum(np.vdot(Xk + ap * d1, Sk + ad * d2) for Xk, d1, Sk, d2 in zip(X, dXa, S, dSa)) / n
            sigma = min(1.0, max(0.0, mu_aff / mu)) ** 3
            corr = [d1 @ d2 for d1, d2 in zip(dXa, dSa)]
            dX, dt, dy, dS, ap, ad = direction(sigma, corr)
        except np.linalg.LinAlgError as exc:
            status = Status.NUMERICAL_FAILURE
            history.append(("failure", str(exc)))
            break
        ap = min(1.0, STEP_FRACTION * ap)
        ad = min(1.0, STEP_FRACTION * ad)
        X_new = _backtrack(X, dX, ap)
        y_new, S_new = y, S
        for _ in range(30):
            y_try = y + ad * dy
            S_try = [_adjoint(A, y_try) for A in blocks]
            if _is_pd(S_try):
                y_new, S_new = y_try, S_try
                break
            ad *= 0.5
        if X_new is None or y_new is y:
            status = Status.NUMERICAL_FAILURE
            history.append(("failure", "no step keeps the iterates inside the PSD cone"))
            break
        X, t, y, S = X_new[0], t + X_new[1] * dt, y_new, S_new

    return SdpSolution(
        t_lower=best_lo,
        t_upper=best_up,
        status=status,
        Q=best_X[0] * scale,
        Q2=best_X[1] * scale,
        y=y,
        iterations=it,
        history=[h for h in history if h[0] != "failure"],
    )


def _factor(K):
    if not np.all(np.isfinite(K)):
        raise np.linalg.LinAlgError("non-finite Newton matrix")
    lu = scipy.linalg.lu_factor(K, check_finite=False)
    if np.any(np.diag(lu[0]) == 0.0):
        raise np.linalg.LinAlgError("singular Newton matrix")
    return lu


def _solve(lu, rhs):
    x = scipy.linalg.lu_solve(lu, rhs, check_finite=False)
    if not np.all(np.isfinite(x)):
        raise np.linalg.LinAlgError("Newton solve produced non-finite values")
    return x


def _stalled(history, window: int = 8) -> bool:
    gaps = [up - lo for lo, up in history if lo != "failure"]
    if len(gaps) <= window:
        return False
    return min(gaps[-window:]) > 0.5 * min(gaps[:-window])


def _backtrack(X, dX, alpha):
    for _ in range(30):
        X_try = [Xk + alpha * d for Xk, d in zip(X, dX)]
        if _is_pd(X_try):
            return X_try, alpha
        alpha *= 0.5
    return None


def _is_pd(mats) -> bool:
    try:
        for Mk in mats:
            if Mk.size:
                np.linalg.cholesky(Mk)
    except np.linalg.LinAlgError:
        return False
    return True


def minimize_by_sdp(p: ChebProxy, eps3: float, max_iters: int = 100) -> float:
    """Upper estimate ``f`` of ``min p`` with ``min p <= f <= min p + eps3``.

    Degree-0 and degree-1 proxies are minimized in closed form.
    """
    c = p.coeffs
    if c.size == 1:
        return float(c[0])
    if c.size == 2:
        return float(c[0] - abs(c[1]))
    sol = solve_sdp(build_reformulation(c), eps3, max_iters=max_iters)
    if sol.status is not Status.OPTIMAL:
        raise SolverFailure(
            f"SDP stopped with status {sol.status.value} (gap {sol.gap:.3e}, target {eps3:.3e})",
            solution=sol,
        )
    return sol.t_upper

