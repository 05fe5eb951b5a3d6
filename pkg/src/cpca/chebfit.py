"""Chebyshev proxies of univariate functions on a closed interval.

A proxy is a truncated Chebyshev series ``sum_j c_j T_j(u)`` in the mapped
variable ``u = (2x - (lo + hi)) / (hi - lo)``. Proxies are built by
interpolation at Chebyshev extrema, with the degree doubled until the
interpolant matches the function at the points that the next grid adds.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.fft import dct

from .errors import DegreeCapExceeded

DEFAULT_M_MAX = 2**14
# above this degree the O(m^2) cosine sum is replaced by the DCT-I path
DIRECT_SUM_LIMIT = 512


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)) or not lo < hi:
            raise ValueError(f"interval needs finite lo < hi, got [{self.lo}, {self.hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def center(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def to_unit(self, x):
        """Map points of ``[lo, hi]`` onto ``[-1, 1]``."""
        return (2.0 * np.asarray(x, dtype=float) - (self.lo + self.hi)) / self.width

    def from_unit(self, u):
        """Inverse of :meth:`to_unit`."""
        return 0.5 * self.width * np.asarray(u, dtype=float) + self.center


@dataclass(frozen=True)
class ChebProxy:
    interval: Interval
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float).ravel()
        if c.size < 1:
            raise ValueError("a proxy needs at least one coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def __call__(self, x):
        return eval_clenshaw(self, x)


@dataclass(frozen=True)
class ApproxReport:
    degree: int
    achieved_check_error: float
    evals_used: int


def cheb_points(m: int, iv: Interval) -> np.ndarray:
    """Chebyshev extrema ``x_k`` for ``k = 0..m``, in descending order of x."""
    if m < 1:
        raise ValueError("m must be at least 1")
    k = np.arange(m + 1)
    return 0.5 * iv.width * np.cos(k * np.pi / m) + iv.center


def coeffs_from_values(values, method: str = "direct") -> np.ndarray:
    """Chebyshev coefficients of the interpolant through values at the extrema.

    ``values[k]`` must be the function value at ``cheb_points(m, iv)[k]``.
    The first and last coefficients are halved so that the series
    reproduces ``values`` exactly at the nodes.

    Parameters
    ----------
    values : array_like
        ``m + 1`` samples, ``m >= 1``.
    method : {"direct", "dct"}
        ``"direct"`` evaluates the cosine sum in O(m^2); ``"dct"`` uses a
        type-I discrete cosine transform.
    """
    f = np.asarray(values, dtype=float).ravel()
    if f.size < 2:
        raise ValueError("need at least two samples (degree >= 1)")
    m = f.size - 1
    if method == "direct":
        j = np.arange(m + 1)
        k = np.arange(1, m)
        cos_jk = np.cos(np.outer(j, k) * np.pi / m)
        c = (f[0] + f[m] * np.cos(j * np.pi)) / m + (2.0 / m) * (cos_jk @ f[1:m])
    elif method == "dct":
        c = dct(f, type=1) / m
    else:
        raise ValueError(f"unknown method {method!r}")
    c[0] *= 0.5
    c[m] *= 0.5
    return c


def _clenshaw_unit(coeffs: np.ndarray, u):
    u = np.asarray(u, dtype=float)
    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    two_u = 2.0 * u
    for c in coeffs[:0:-1]:
        b1, b2 = c + two_u * b1 - b2, b1
    return coeffs[0] + u * b1 - b2


def eval_clenshaw(p: ChebProxy, x):
    """Evaluate the proxy at ``x`` (scalar or array) by Clenshaw's recurrence."""
    y = _clenshaw_unit(p.coeffs, p.interval.to_unit(x))
    return float(y) if np.ndim(y) == 0 else y


def _evaluate(f: Callable, x: np.ndarray) -> np.ndarray:
    # objectives may or may not broadcast over arrays
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(xi)) for xi in x])


def adaptive_fit(
    f: Callable,
    iv: Interval,
    eps1: float,
    m_max: int = DEFAULT_M_MAX,
    strict: bool = False,
) -> tuple[ChebProxy, ApproxReport]:
    """Fit a Chebyshev proxy to ``f`` on ``iv`` with check error at most ``eps1``.

    Starting from degree 2, the degree-m interpolant is compared with ``f``
    at the m points that the 2m grid adds to the m grid; the degree is
    doubled until the largest deviation there is within ``eps1``. Samples
    are reused between rounds since the grids nest, so a proxy of final
    degree m costs exactly ``2m + 1`` evaluations of ``f``.

    With ``strict=True`` the interpolant must additionally match ``f`` on a
    33-point uniform grid (extra evaluations are then counted too).

    Raises
    ------
    DegreeCapExceeded
        If the degree would exceed ``m_max``.
    """
    if eps1 <= 0:
        raise ValueError("eps1 must be positive")
    m = 2
    # samples on the grid of degree 2m, in cheb_points order
    fine = _evaluate(f, cheb_points(2 * m, iv))
    extra_evals = 0
    uniform = np.linspace(iv.lo, iv.hi, 33) if strict else None
    f_uniform = _evaluate(f, uniform) if strict else None
    last_err = np.inf
    while m <= m_max:
        coarse = fine[::2]
        method = "direct" if m <= DIRECT_SUM_LIMIT else "dct"
        p = ChebProxy(iv, coeffs_from_values(coarse, method=method))
        new_x = cheb_points(2 * m, iv)[1::2]
        err = float(np.max(np.abs(fine[1::2] - eval_clenshaw(p, new_x))))
        if strict:
            err = max(err, float(np.max(np.abs(f_uniform - eval_clenshaw(p, uniform)))))
        last_err = err
        if np.isfinite(err) and err <= eps1:
            if strict:
                extra_evals = uniform.size
            return p, ApproxReport(m, err, 2 * m + 1 + extra_evals)
        m *= 2
        if m > m_max:
            break
        refined = np.empty(2 * m + 1)
        refined[::2] = fine
        refined[1::2] = _evaluate(f, cheb_points(2 * m, iv)[1::2])
        fine = refined
    raise DegreeCapExceeded(m_max, last_err)


def max_error_on_grid(f: Callable, p: ChebProxy, n: int = 10_000) -> float:
    """Largest ``|f - p|`` over ``n`` uniformly spaced points of the proxy's interval."""
    if n < 2:
        raise ValueError("n must be at least 2")
    x = np.linspace(p.interval.lo, p.interval.hi, n)
    return float(np.max(np.abs(_evaluate(f, x) - eval_clenshaw(p, x))))
