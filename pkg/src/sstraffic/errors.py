"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter lies outside its mathematical domain."""


class EmbeddingError(RuntimeError):
    """Circulant embedding produced a materially negative eigenvalue."""


class NonEstimableError(ValueError):
    """A trace cannot support a Hurst estimate (constant, too short, ...)."""


class LengthMismatchError(ValueError):
    pass


class TransformRangeError(ArithmeticError):
    """exp(k * X) would overflow double precision."""


class TraceFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
