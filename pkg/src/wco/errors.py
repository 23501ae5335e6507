"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: parameter problems are
usage errors (exit 2), violated mathematical hypotheses are precondition
failures (exit 3), and cases where the spectral characterization simply
does not apply exit with 4.
"""


class WcoError(Exception):
    """Base class for all package errors."""


class ParameterError(WcoError, ValueError):
    """An argument is outside its admissible range or malformed."""


class PreconditionError(WcoError):
    """A documented mathematical hypothesis of an operation is violated."""


class InapplicableError(WcoError):
    """The requested conclusion is not covered by the implemented theory."""


class FixedPointInconclusive(PreconditionError):
    """Fixed-point iteration neither settled in the disc nor escaped."""


class NumericsError(WcoError):
    """A numerical routine failed to converge."""
