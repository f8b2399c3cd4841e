"""Exceptions shared across the package.

Two failure classes matter to callers: bad input (rejected data, exit
code 1 in the CLI) and internal consistency violations (a computation
contradicted an identity that must hold, exit code 2).
"""


class BigtorError(Exception):
    """Base class for package errors."""


class InputError(BigtorError):
    """Raised when user-supplied data is malformed or out of range."""


class NotGKMError(InputError):
    """Raised when a complex/matrix pair does not carry GKM structure
    (non-pure complex or a singular vertex submatrix)."""


class InternalCheckError(BigtorError):
    """Raised when a cross-check that must hold by theory fails.

    This always indicates a bug, never a property of the input.
    """
