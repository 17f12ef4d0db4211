"""Exception hierarchy shared by the library and the CLI."""


class CggError(Exception):
    """Base class for all errors raised by cggpack."""

    exit_code = 2


class InvalidEdgeError(CggError, ValueError):
    pass


class ParameterError(CggError, ValueError):
    pass


class PreconditionError(CggError, ValueError):
    pass


class RouteError(CggError):
    """The requested construction has no supported route for this pattern."""


class ModeError(CggError):
    pass


class CompositionError(CggError):
    pass


class VerificationError(CggError):
    exit_code = 3


class ParseError(CggError, ValueError):
    exit_code = 4

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)
        self.position = position
