"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes, so raise the most specific class
that applies.
"""


class SpingapError(Exception):
    """Base class for all package errors."""


class ValidationError(SpingapError):
    """Bad input: malformed matrices, out-of-range parameters, bad files."""


class DimensionCapError(ValidationError):
    """A requested computation exceeds the configured dimension caps."""


class NumericalAmbiguityError(SpingapError):
    """A spectral quantity fell inside a guard band and cannot be classified
    automatically (kernel thresholding, unit-eigenvalue separation)."""


class ConvergenceError(SpingapError):
    """An iterative solver failed to reach the requested residual."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class FrustrationFreeViolation(ValidationError):
    """A model failed the frustration-freeness gate."""

    def __init__(self, message, failing_length=None, report=None):
        super().__init__(message)
        self.failing_length = failing_length
        self.report = report


class InconclusiveBoundError(SpingapError):
    """epsilon >= 1/2: the method cannot certify a positive bound.

    This is not a model failure; the hypothesis of the bound simply does
    not hold for the chosen (m, n).
    """

    def __init__(self, message, epsilon=None):
        super().__init__(message)
        self.epsilon = epsilon


class VerificationFailure(SpingapError):
    """A self-check (operator inequality, cross validation) failed."""
