"""Exception types shared across the package."""


class GroupSpeedError(Exception):
    """Base class for all package errors."""


class DegenerateInput(GroupSpeedError):
    """Input data cannot define a valid curve or domain."""


class NonConvexFit(GroupSpeedError):
    """Fitted curve fails the strict-convexity grid check."""


class InteriorMinimumMissing(GroupSpeedError):
    """Fitted curve attains its minimum at a domain endpoint."""


class OutOfDomain(GroupSpeedError):
    """Evaluation point lies outside the curve's domain."""


class DimensionMismatch(GroupSpeedError):
    """Vector/matrix dimensions disagree."""


class NonConvergence(GroupSpeedError):
    """Iteration budget exhausted or iterates diverged.

    Carries the partial trace so callers can inspect it.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class EmptyDomainIntersection(GroupSpeedError):
    """Agents' speed domains share no common interval."""


class InvalidSpec(GroupSpeedError):
    """Scenario specification is malformed."""
