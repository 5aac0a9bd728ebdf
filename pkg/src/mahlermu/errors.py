"""Exception types shared across the package."""


class MahlerError(Exception):
    """Base class for every error raised by this package."""


class ZeroDivisorError(MahlerError, ZeroDivisionError):
    def __init__(self, msg: str = "zero divisor"):
        super().__init__(msg)


class UndefinedGcdError(MahlerError):
    def __init__(self, msg: str = "undefined gcd"):
        super().__init__(msg)


class ParseError(MahlerError, ValueError):
    pass


class EquationError(MahlerError, ValueError):
    pass


class InconsistentSystemError(MahlerError):
    def __init__(self, msg: str = "inconsistent"):
        super().__init__(msg)


class FreeParameterError(MahlerError):
    """The coefficient system leaves some positions undetermined."""

    def __init__(self, positions):
        self.positions = sorted(positions)
        joined = ", ".join(str(p) for p in self.positions)
        super().__init__(f"free parameter at position {joined}")


class SeriesAppearsRational(MahlerError):
    def __init__(self, msg: str = "series appears rational"):
        super().__init__(msg)


class PrecisionBudgetExceeded(MahlerError):
    pass


class InsufficientExpansion(MahlerError):
    pass


class LowerBoundUndefined(MahlerError):
    def __init__(self, msg: str = "lower bound undefined"):
        super().__init__(msg)


class DegenerateOrbit(MahlerError):
    def __init__(self, msg: str = "degenerate orbit"):
        super().__init__(msg)


class TransformError(MahlerError, ValueError):
    pass


class HorizonTooSmall(MahlerError, ValueError):
    """No finite upper bound for mu at the configured horizon."""
