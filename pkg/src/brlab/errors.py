"""Exception hierarchy shared by every module."""


class BrlabError(Exception):
    """Base class for all library errors."""


class InvalidInputError(BrlabError, ValueError):
    pass


class PrecisionError(BrlabError, ArithmeticError):
    """Working precision ran out before the requested result was trustworthy."""

    def __init__(self, message, last_trusted_index=None):
        super().__init__(message)
        self.last_trusted_index = last_trusted_index


class UnsupportedModeError(BrlabError):
    """The operation needs a value mode the input does not carry."""


class ConstructionError(BrlabError):
    pass


class DecompositionError(BrlabError):
    pass


class InternalConsistencyError(BrlabError, AssertionError):
    """A proof-level inequality failed; signals a bug, never bad input."""


class ResourceError(BrlabError):
    pass
