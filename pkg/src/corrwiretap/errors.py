"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function or model."""


class ConvergenceFailure(ArithmeticError):
    """A truncated series hit its term cap before meeting the tolerance.

    ``partial`` holds the partial sum reached and ``terms_used`` the number
    of terms summed.
    """

    def __init__(self, message, partial=None, terms_used=None):
        super().__init__(message)
        self.partial = partial
        self.terms_used = terms_used


class NumericalInconsistency(ArithmeticError):
    """A computed probability or capacity left its admissible range."""


class QuadratureNonconvergence(ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget."""
