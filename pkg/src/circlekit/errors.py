"""Exception types raised across the package."""


class CircleKitError(Exception):
    """Base class for all package errors."""


class ValidationError(CircleKitError, ValueError):
    """Input does not satisfy a documented precondition."""


class NumericalFailure(CircleKitError, ArithmeticError):
    """A computation ran but did not reach its stated accuracy."""


class NotNonnegative(ValidationError):
    pass


class IllConditioned(NumericalFailure):
    pass


class OutsideDisk(ValidationError):
    pass


class NonContractive(ValidationError):
    pass


class NotAbsolutelyContinuous(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NotContractivelyContained(ValidationError):
    pass


class NotContraction(ValidationError):
    pass


class SingularMetric(NumericalFailure):
    pass


class SingularReference(NumericalFailure):
    pass


class IllPosed(NumericalFailure):
    pass


class NotConverged(NumericalFailure):
    """Iteration stopped at its cap; ``result`` holds the last iterate."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result
