"""Calculus on Chebyshev proxies: derivatives, real roots, global minima.

Minimization enumerates the stationary points (eigenvalues of the colleague
matrix of the derivative) together with the two endpoints and keeps the
smallest proxy value.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .chebfit import ChebProxy, Interval, eval_clenshaw
from .errors import TrailingCoeffDropped

TRIM_RTOL = 1e-13
EDGE_TOL = 1e-10
DEDUP_TOL = 1e-10
# near-real eigenvalues within this imaginary part are still tried as
# minimization candidates; a wrong candidate can only cost an evaluation
CANDIDATE_IMAG_TOL = 1e-4


@dataclass(frozen=True)
class CriticalSet:
    points: np.ndarray
    values: np.ndarray


def derivative_coeffs(p: ChebProxy) -> np.ndarray:
    """Chebyshev coefficients of ``dp/dx`` in the proxy's mapped basis."""
    c = p.coeffs
    m = c.size - 1
    if m == 0:
        return np.zeros(1)
    scale = 2.0 / p.interval.width
    d = np.zeros(m + 2)
    for j in range(m - 1, 0, -1):
        d[j] = d[j + 2] + 2.0 * (j + 1) * scale * c[j + 1]
    d[0] = 0.5 * d[2] + scale * c[1]
    return d[:m]


def _trim(coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=float).ravel()
    big = np.max(np.abs(c)) if c.size else 0.0
    if big == 0.0:
        return c[:0]
    keep = np.nonzero(np.abs(c) > TRIM_RTOL * big)[0][-1] + 1
    if keep < c.size and np.any(c[keep:] != 0.0):
        warnings.warn(
            f"dropped {c.size - keep} negligible leading coefficient(s)",
            TrailingCoeffDropped,
            stacklevel=3,
        )
    return c[:keep]


def colleague_matrix(coeffs) -> np.ndarray:
    """Colleague matrix whose eigenvalues are the roots of ``sum_j a_j T_j(u)``.

    Leading coefficients that are negligible relative to the largest one
    are dropped first (with a :class:`TrailingCoeffDropped` warning).
    """
    a = _trim(coeffs)
    n = a.size - 1
    if n < 1:
        raise ValueError("need a polynomial of degree >= 1")
    if n == 1:
        return np.array([[-a[0] / a[1]]])
    C = np.zeros((n, n))
    C[0, 1] = 1.0
    for i in range(1, n - 1):
        C[i, i - 1] = 0.5
        C[i, i + 1] = 0.5
    C[n - 1, n - 2] = 0.5
    C[n - 1, :] -= a[:n] / (2.0 * a[n])
    return C


def _colleague_eigenvalues(coeffs) -> np.ndarray:
    a = _trim(coeffs)
    if a.size < 2:
        return np.empty(0, dtype=complex)
    return np.linalg.eigvals(colleague_matrix(a))


def _real_roots(eig: np.ndarray, iv: Interval, imag_tol: float | None) -> np.ndarray:
    if eig.size == 0:
        return np.empty(0)
    if imag_tol is None:
        imag_tol = 1e-8 * (1.0 + np.max(np.abs(eig)))
    u = eig.real[(np.abs(eig.imag) <= imag_tol) & (np.abs(eig.real) <= 1.0 + EDGE_TOL)]
    u = np.clip(u, -1.0, 1.0)
    return _dedup(np.sort(iv.from_unit(u)), DEDUP_TOL)


def real_roots_in_interval(dcoeffs, iv: Interval, imag_tol: float | None = None) -> np.ndarray:
    """Real roots in ``iv`` of the series with coefficients ``dcoeffs``.

    Returns a sorted array of distinct points of ``iv``; a constant (or
    empty) series has no roots.
    """
    return _real_roots(_colleague_eigenvalues(dcoeffs), iv, imag_tol)


def _dedup(x: np.ndarray, tol: float) -> np.ndarray:
    if x.size == 0:
        return x
    keep = np.concatenate(([True], np.diff(x) > tol))
    return x[keep]


def critical_points(p: ChebProxy) -> CriticalSet:
    iv = p.interval
    pts = [np.array([iv.lo, iv.hi])]
    if p.degree >= 2:
        eig = _colleague_eigenvalues(derivative_coeffs(p))
        pts.append(_real_roots(eig, iv, None))
        near = eig.real[(np.abs(eig.imag) <= CANDIDATE_IMAG_TOL) & (np.abs(eig.real) <= 1.0)]
        pts.append(iv.from_unit(near))
    x = _dedup(np.sort(np.concatenate(pts)), DEDUP_TOL)
    x[0], x[-1] = iv.lo, iv.hi
    return CriticalSet(x, np.atleast_1d(eval_clenshaw(p, x)))


def minimize_by_stationary_points(p: ChebProxy) -> tuple[float, list[float]]:
    """Global minimum of the proxy over its interval and every point attaining it."""
    cs = critical_points(p)
    f_star = float(np.min(cs.values))
    tie = 1e-9 * (1.0 + abs(f_star))
    return f_star, [float(x) for x in cs.points[cs.values <= f_star + tie]]
