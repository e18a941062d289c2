"""Exception hierarchy shared by all modules."""


class BergmanError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BergmanError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class ConvergenceError(BergmanError, ArithmeticError):
    """A series did not meet its termination criterion before the term cap."""

    def __init__(self, message, last_term=float("nan")):
        super().__init__(message)
        self.last_term = last_term


class InternalInconsistencyError(BergmanError, ArithmeticError):
    """A provable inequality failed numerically; the series data is corrupt."""


class QuadratureError(BergmanError, ArithmeticError):
    """A quadrature-built Gram matrix is not numerically positive definite."""

    def __init__(self, message, pivot=-1):
        super().__init__(message)
        self.pivot = pivot


class OracleEnvelopeError(BergmanError, ValueError):
    """The requested oracle configuration lies outside its validity envelope."""


class ConstructionError(BergmanError, RuntimeError):
    """The Zalcman constructor could not certify a stage."""

    def __init__(self, message, stage=0, inequality=""):
        super().__init__(message)
        self.stage = stage
        self.inequality = inequality
