"""Exception types raised across the package."""


class CLLSRError(Exception):
    """Base class for all package errors."""


class NumericalFailure(CLLSRError, ArithmeticError):
    pass


class NotSymmetric(CLLSRError, ValueError):
    pass


class DimensionTooLarge(CLLSRError, ValueError):
    pass


class ShapeMismatch(CLLSRError, ValueError):
    pass


class LengthMismatch(CLLSRError, ValueError):
    pass


class FileMissing(CLLSRError, FileNotFoundError):
    pass


class ParseError(CLLSRError, ValueError):
    pass


class TooFewSamples(CLLSRError, ValueError):
    pass


class BacktrackExhausted(CLLSRError, ArithmeticError):
    """Line search grew the step constant past its hard cap without accepting a step."""


class EmptyClusterUnrecoverable(CLLSRError, RuntimeError):
    pass


class WriteFailure(CLLSRError, OSError):
    pass
