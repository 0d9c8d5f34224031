"""Exception types raised across the package."""


class ShapeError(ValueError):
    """Array shapes are incompatible with the requested operation."""


class BoundsError(ValueError):
    """An index or mode count lies outside the admissible range."""


class UnsupportedSizeError(ValueError):
    pass


class ConfigurationError(ValueError):
    """Model, data and training settings do not fit together."""


class StateError(RuntimeError):
    """A recorded tape does not match the values handed to the backward pass."""


class SolverError(RuntimeError):
    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class UndefinedMetricError(ValueError):
    pass


class FormatError(ValueError):
    """A binary file is malformed; ``offset`` is the byte position of the problem."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
