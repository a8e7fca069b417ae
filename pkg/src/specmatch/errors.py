class SpecMatchError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(SpecMatchError, ValueError):
    """Bad input: wrong shape, out-of-range parameter, malformed config."""


class UnsupportedKernelError(ValidationError):
    """Operation needs a spectral measure the kernel does not have."""


class NumericalError(SpecMatchError, ArithmeticError):
    """A computation became unstable or produced non-finite values."""
