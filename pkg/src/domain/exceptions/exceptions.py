class DomainException(Exception):
    """Base domain exception"""
    pass


class LinearAlgebraException(DomainException):
    """Dense/sparse linear algebra exceptions"""
    pass


class DimensionMismatchException(LinearAlgebraException):
    """Raised when operand shapes do not agree"""
    pass


class InvalidMatrixException(LinearAlgebraException):
    """Raised when CSR arrays violate their structural invariants"""
    pass


class SubspaceExhaustedException(LinearAlgebraException):
    """Raised when a vector has no component outside the current basis"""

    def __init__(self, message: str, coefficients=None):
        super().__init__(message)
        self.coefficients = coefficients


class EigFailedException(LinearAlgebraException):
    """Raised when the dense QR iteration does not converge"""
    pass


class FilterException(DomainException):
    """Chebyshev filter exceptions"""
    pass


class InvalidFilterException(FilterException):
    """Raised when an ellipse or filter spec violates its invariants"""
    pass


class RangeExceededException(FilterException):
    """Raised when a Chebyshev value leaves the double range"""
    pass


class FilterDegenerateException(FilterException):
    """Raised when the recurrence denominator vanishes"""
    pass


class NoSeparationException(FilterException):
    """Raised when the wanted Ritz value is not right of the unwanted ones"""
    pass


class SolverException(DomainException):
    """Eigensolver exceptions"""
    pass


class InvalidSolverConfigException(SolverException):
    """Raised when solver parameters violate their invariants"""
    pass


class NotConvergedException(SolverException):
    """Raised when the outer-iteration cap is reached before convergence"""

    def __init__(self, message: str, result=None):
        super().__init__(message)
        self.result = result


class ProblemException(DomainException):
    """Test-problem construction and ingestion exceptions"""
    pass


class MatrixMarketParseException(ProblemException):
    """Raised when a Matrix Market file cannot be read"""

    def __init__(self, message: str, line_number: int = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number
