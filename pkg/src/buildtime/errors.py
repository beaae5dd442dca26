class SchemaError(ValueError):
    """Input data does not match the expected column schema."""


class ConvergenceError(RuntimeError):
    """Iterative solver ran out of iterations; carries the last iterate."""

    def __init__(self, message, coefficients=None, intercept=None):
        super().__init__(message)
        self.coefficients = coefficients
        self.intercept = intercept
