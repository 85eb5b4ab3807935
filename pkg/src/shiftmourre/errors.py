"""Exception hierarchy shared by all modules."""


class ShiftMourreError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(ShiftMourreError, ValueError):
    """Bad input detected before any computation starts."""


class NumericalError(ShiftMourreError, ArithmeticError):
    """A computation could not be carried out reliably."""


class NonCommensurate(ValidationError):
    pass


class TooCoarse(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class ComplexPotential(ValidationError):
    pass


class TooLargeForDense(ValidationError):
    pass


class WindowOutsideI(ValidationError):
    pass


class EmptyWindow(NumericalError):
    pass


class ResolutionTooCoarse(ValidationError):
    pass


class NearSpectrumSingular(NumericalError):
    pass


class UnboundFunction(ValidationError):
    pass


class UnknownSymbol(ValidationError):
    pass


class ExprSyntaxError(ValidationError, SyntaxError):
    """Parse failure; ``pos`` is the 0-based character offset."""

    def __init__(self, message, text="", pos=0):
        super().__init__(f"{message} at position {pos}")
        self.text = text
        self.pos = pos
        self.msg = message


class SupportTouchesBoundary(UserWarning):
    """A potential has noticeable weight outside the interior region."""
