"""Exception types raised across the package."""


class SdlabError(Exception):
    """Base class for every error raised by :mod:`sdlab`."""


class InvalidSpecError(SdlabError, ValueError):
    """Malformed algebra description, tolerance, file or instance parameter."""


class ShapeError(SdlabError, ValueError):
    """Dimensions or domains of the operands do not agree."""


class PreconditionError(SdlabError, ValueError):
    """A construction was asked to run on inputs its hypotheses exclude.

    ``check`` holds the name of the failing hypothesis and ``residual`` the
    measured value, so callers can report the margin.
    """

    def __init__(self, message, check=None, residual=None):
        super().__init__(message)
        self.check = check
        self.residual = residual
