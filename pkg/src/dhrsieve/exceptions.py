"""Exception hierarchy shared by every module of the package."""


class DHRSieveError(Exception):
    """Base class for all errors raised by this package."""


class NonConvergence(DHRSieveError):
    """An iterative numerical routine failed to reach its tolerance."""


class NonFinite(DHRSieveError, ArithmeticError):
    """An integrand returned NaN or infinity at an interior node."""


class NoSignChange(DHRSieveError, ValueError):
    """The target function has the same sign at both ends of a bracket."""


class DomainError(DHRSieveError, ValueError):
    """Argument outside the range on which a function is implemented."""


class InvalidParameters(DHRSieveError, ValueError):
    """Sieve parameters violate an ordering or admissibility constraint."""


class NotPrime(DHRSieveError, ValueError):
    pass


class NotSquarefree(DHRSieveError, ValueError):
    pass


class FactorizationFailure(DHRSieveError):
    """A composite survived every stage of the factoring strategy."""


class PolynomialError(DHRSieveError, ValueError):
    """Malformed or degenerate integer polynomial."""
