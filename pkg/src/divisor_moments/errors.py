"""Exception types raised by the package."""


class DivisorMomentsError(Exception):
    """Base class for package errors."""


class InvalidPairError(DivisorMomentsError, ValueError):
    """The exponent pair is not 1 <= a <= b with gcd(a, b) = 1."""


class PoleError(DivisorMomentsError, ValueError):
    """A zeta value was requested at its pole s = 1."""


class UndefinedDerivativeError(DivisorMomentsError, ValueError):
    """The derivative does not exist at this point (a jump of psi)."""


class CapacityError(DivisorMomentsError, MemoryError):
    """A table would exceed the configured memory budget."""


class IdentityViolation(DivisorMomentsError, ArithmeticError):
    """Two independent evaluations of an exact identity disagree beyond tolerance."""

    def __init__(self, message: str, *, x: float, discrepancy: float, tol: float):
        super().__init__(message)
        self.x = x
        self.discrepancy = discrepancy
        self.tol = tol
