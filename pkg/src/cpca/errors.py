"""Exception types raised across the package."""


class CpcaError(Exception):
    """Base class for all errors raised by :mod:`cpca`."""

    #: Pipeline stage that produced the error, filled in by ``run_cpca``.
    stage: str | None = None


class InstanceError(CpcaError):
    """The problem instance itself is unusable (bad graph, empty feasible set)."""


class NumericalError(CpcaError):
    """A numerical routine failed to reach its target."""


class DegreeCapExceeded(NumericalError):
    def __init__(self, m_max, last_error):
        self.m_max = m_max
        self.last_error = last_error
        super().__init__(
            f"no proxy met the tolerance up to degree {m_max} "
            f"(last check error {last_error:.3e})"
        )


class EmptyIntersection(InstanceError):
    def __init__(self, lo, hi):
        self.lo = lo
        self.hi = hi
        super().__init__(f"local constraint sets do not overlap: [{lo}, {hi}]")


class NotConnectedAfterRetries(InstanceError):
    pass


class RoundCapExceeded(NumericalError):
    pass


class SolverFailure(NumericalError):
    """The SDP solver stopped without a certified solution."""

    def __init__(self, message, solution=None):
        self.solution = solution
        super().__init__(message)


class TrailingCoeffDropped(UserWarning):
    """Emitted when negligible leading Chebyshev coefficients are trimmed."""
