"""Exception hierarchy.

Every error raised deliberately by the package derives from
:class:`ErgmError`, so the CLI can map input problems and numerical
failures to distinct exit codes.
"""


class ErgmError(Exception):
    """Base class for package errors."""


class InputError(ErgmError, ValueError):
    """Malformed or inconsistent user input (exit code 2)."""


class InvalidDyadError(InputError):
    pass


class DegenerateNetworkError(InputError):
    pass


class ModelAttributeMismatch(InputError):
    pass


class InvalidOffsetError(InputError):
    pass


class TooLargeError(InputError):
    pass


class NotEgocentricError(InputError):
    """A term cannot be inferred from ego-alter reports."""


class WrongMethodError(InputError):
    pass


class NumericalError(ErgmError):
    """Numerical failure: non-convergence or degeneracy (exit code 3)."""


class DegeneracyError(NumericalError):
    """Target statistics lie on the boundary of the achievable space."""


class SeparationError(NumericalError):
    """A statistic perfectly predicts tie presence; the MLE is infinite."""
