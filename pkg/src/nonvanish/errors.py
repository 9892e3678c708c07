"""Error taxonomy shared by the library, the CLI and the HTTP service.

Exit-code / HTTP mapping (see cli.py and service.py):
    SpecValidationError  -> exit 2 / HTTP 400
    CapacityError        -> exit 3 / HTTP 413
    AccuracyError        -> exit 4 / HTTP 500
"""


class NonvanishError(Exception):
    """Base class for all library errors."""


class SpecValidationError(NonvanishError, ValueError):
    """Bad input: violated precondition, malformed parameter, domain error."""


class UnsupportedParameterError(SpecValidationError):
    """Parameter outside the supported range (e.g. divisor order k > 4)."""


class DegenerateMollifierError(SpecValidationError):
    """Mollifier with vanishing second moment; the proportion is undefined."""


class CapacityError(NonvanishError, RuntimeError):
    """Requested size exceeds a configured cap (sieve length, modulus, ...)."""


class AccuracyError(NonvanishError, RuntimeError):
    """A numerical routine failed to reach its accuracy budget."""
