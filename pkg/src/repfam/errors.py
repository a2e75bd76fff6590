"""Exception hierarchy shared across the package."""


class RepfamError(Exception):
    """Base class for all package-specific errors."""


class InvalidInputError(RepfamError):
    """Malformed numeric input (non-finite entries, bad shapes, bad tolerances)."""


class DomainError(RepfamError):
    """A chart parameter or function argument lies outside its domain."""


class SpecError(RepfamError):
    """A specification file or constructed object violates its contract."""


class PreconditionError(RepfamError):
    """An operation was invoked on inputs that fail its stated precondition."""


class GridTooSmallError(RepfamError):
    """An evaluation grid does not resolve the function space (rank-deficient)."""


class NotInvariantError(RepfamError):
    """A function space is not closed under left translation on the given grid."""


class InsufficientSamplesError(RepfamError):
    """Too few group samples to determine the linear system being solved."""


class MembershipError(RepfamError):
    """A natural parameter lies outside the family's integrability domain."""


class QuadratureError(RepfamError):
    """Numerical integration failed to converge or contradicted a verdict."""
