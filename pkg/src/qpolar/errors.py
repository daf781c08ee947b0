"""Exception hierarchy. CLI exit codes key off the two top-level families."""


class QPolarError(Exception):
    """Base class for all library errors."""


class ValidationError(QPolarError, ValueError):
    """Inputs violate a precondition (CLI exit code 2)."""


class NumericalError(QPolarError, ArithmeticError):
    """A numerical construction cannot be carried out (CLI exit code 3)."""


class CutoffExceededError(ValidationError):
    pass


class BasisMismatchError(ValidationError):
    pass


class InvalidStateError(ValidationError):
    pass


class UndefinedPolarizationError(ValidationError):
    """Raised where a degree of polarization is required but S0 = 0."""


class InconsistentStrategyError(ValidationError):
    pass


class MultiBlockError(ValidationError):
    """A single photon-number block was required."""


class SingularDecompositionError(NumericalError):
    pass
