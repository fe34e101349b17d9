"""Error types raised by the Gabor toolkit."""

from typing import Optional


class GaborError(Exception):
    """Base class for all toolkit errors."""
    pass


class UndefinedGcdError(GaborError, ValueError):
    """gcd(0, 0) was requested."""

    def __init__(self):
        super().__init__("undefined gcd: both arguments are zero")


class IllegalLengthError(GaborError, ValueError):
    """Signal length does not fit the lattice parameters."""

    def __init__(self, message: str, l_min: Optional[int] = None):
        if l_min is not None:
            message = f"{message} (L_min = {l_min}; L must be a multiple of it)"
        super().__init__(f"illegal transform length: {message}")
        self.l_min = l_min


class NotAFrameError(GaborError, ArithmeticError):
    """The Gabor system is not a frame, so no dual or tight window exists."""

    def __init__(self, detail: str = ""):
        super().__init__(f"not a frame{': ' + detail if detail else ''}")


class OracleLimitError(GaborError, ValueError):
    """A brute-force oracle was asked to work above its size bound."""

    def __init__(self, what: str, size: int, limit: int, unit: str = "L"):
        super().__init__(f"oracle size limit: {what} needs {unit}={size} > {limit}")
        self.size = size
        self.limit = limit


class NotUnimodularError(GaborError, ValueError):
    def __init__(self, det: int, L: int):
        super().__init__(f"not unimodular: det = {det} (mod {L})")


class DilationError(GaborError, ValueError):
    def __init__(self, a: int, L: int):
        super().__init__(f"non-invertible dilation: gcd({a}, {L}) != 1")


class DimensionError(GaborError, ValueError):
    """Array shapes do not match the lattice."""
    pass


class BlockLengthError(GaborError, ValueError):
    """Overlap-add block parameters are inconsistent."""
    pass


class FileFormatError(GaborError, ValueError):
    """A signal or coefficient file could not be parsed."""
    pass
