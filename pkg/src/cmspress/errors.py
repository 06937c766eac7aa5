"""Error types shared across the package."""


class CmsError(Exception):
    """Base class for all package errors."""


class ValidationError(CmsError):
    """Bad input: malformed file, incompatible objects, violated precondition.

    ``field`` names the offending input when known; the CLI maps this
    error to exit code 2.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class ConvergenceError(CmsError):
    """A numeric iteration failed to converge; maps to CLI exit code 3."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
