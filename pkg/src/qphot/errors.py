"""Exception hierarchy shared by all qphot modules."""


class QphotError(Exception):
    """Base class for every error raised by qphot."""


class InvalidStateError(QphotError, ValueError):
    """A Gaussian state (or its construction parameters) is malformed or unphysical."""


class NonSymplecticError(QphotError, ValueError):
    """A matrix expected to lie in Sp(2N, R) does not preserve the symplectic form."""

    def __init__(self, message, residual):
        super().__init__(message)
        self.residual = residual


class SingularityError(QphotError, ArithmeticError):
    """A matrix that must be inverted is singular for the given input."""


class NumericalAccuracyError(QphotError, ArithmeticError):
    """A computation could not reach its accuracy guarantee."""


class ResourceLimitError(QphotError, MemoryError):
    """The requested computation exceeds a configured size guard."""


class CutoffCapExceeded(ResourceLimitError):
    """No photon-number cutoff below the cap meets the requested tail tolerance."""


class NoPrincipalLogError(QphotError, ValueError):
    """A monodromy matrix has no real logarithm on the principal branch."""
